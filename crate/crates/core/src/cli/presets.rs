//! Built-in parameter sets for the standard figures, as TOML fragments that
//! are merged in order.

use super::{CliError, Command};

const FIG2: &str = r#"
[params]
kappa_ex = 10.0
kappa_i = 10.0
gamma = 5.2
g_tw = 100.0
drive = 0.1
"#;

const FIG3: &str = r#"
[params]
kappa_ex = 20.0
kappa_i = 0.2
gamma = 5.2
g_tw = 100.0
drive = 0.1
"#;

const OVERCOUPLED: &str = r#"
[params]
kappa_ex = 30.0
kappa_i = 0.5
gamma = 5.2
"#;

const SPECTRUM_GRID: &str = r#"
[grid]
start = -300.0
stop = 300.0
count = 601
"#;

const TABLE_ONE: &str = r#"
[params]
kappa_i = 0.0
g_tw = 10000.0
"#;

const FIG4: &str = r#"
[params]
drive = 10.0

[grid]
start = 0.0
stop = 200.0
count = 41
"#;

const FIG5: &str = r#"
[grid]
start = 2.0
stop = 150.0
count = 75

[series]
param = "g_tw"
values = [50.0, 100.0, 150.0]
"#;

const FIG6_BISTABILITY: &str = r#"
[params]
g_tw = 100.0

[grid]
start = 0.0
stop = 25.0
count = 501

[series]
param = "g_tw"
values = [50.0, 100.0, 150.0]
"#;

const FIG6_SPECTRUM: &str = r#"
[params]
g_tw = 150.0

[grid]
start = -400.0
stop = 400.0
count = 161

[series]
param = "drive"
values = [10.0, 50.0, 100.0]

[run]
model = "master"
"#;

const FIG7: &str = r#"
[pulse]
t_p = 0.318
alpha_sq = 10.0

[grid]
start = 0.0
stop = 50.0
count = 51

[series]
param = "g_tw"
values = [50.0, 100.0, 150.0]
"#;

const FIG8: &str = r#"
[params]
kappa_ex = 50.0
kappa_i = 0.5
gamma = 5.2
g_tw = 100.0

[pulse]
t_p = 0.159
alpha_sq = 20.0
"#;

const FIG8_TIMES: &str = r#"
[grid]
start = -1.0
stop = 1.0
count = 401
"#;

const FIG9: &str = r#"
[params]
kappa_ex = 50.0
gamma = 5.2
g_tw = 100.0

[pulse]
t_p = 0.159
alpha_sq = 10.0
"#;

const FIG9_SWEEP: &str = r#"
[grid]
start = 0.0
stop = 50.0
count = 51

[series]
param = "kappa_i"
values = [0.25, 0.5, 1.0, 2.0]
"#;

/// Preset fragments for figure `figure`. Grid, series and pulse settings are
/// included only for the figure's own commands; otherwise just the physical
/// parameters are loaded.
pub fn preset(figure: u8, command: Command) -> Result<Vec<&'static str>, CliError> {
    let (params, natural): (&[&str], &[(Command, &[&str])]) = match figure {
        2 => (&[FIG2], &[(Command::Spectrum, &[SPECTRUM_GRID])]),
        3 => (&[FIG3], &[(Command::Spectrum, &[SPECTRUM_GRID]), (Command::TableOneCheck, &[TABLE_ONE])]),
        4 => (&[OVERCOUPLED], &[(Command::SweepCoupling, &[FIG4])]),
        5 => (&[OVERCOUPLED], &[(Command::SweepDrive, &[FIG5])]),
        6 => (&[OVERCOUPLED], &[(Command::Bistability, &[FIG6_BISTABILITY]), (Command::Spectrum, &[FIG6_SPECTRUM])]),
        7 => (&[OVERCOUPLED], &[(Command::Fidelity, &[FIG7])]),
        8 => (&[FIG8], &[(Command::Pulse, &[FIG8_TIMES])]),
        9 => (&[FIG9], &[(Command::Fidelity, &[FIG9_SWEEP])]),
        _ => return Err(CliError::Config(format!("--figure: no preset for figure {figure} (available: 2-9)"))),
    };
    let mut fragments = params.to_vec();
    if let Some((_, extra)) = natural.iter().find(|(c, _)| *c == command) {
        fragments.extend_from_slice(extra);
    }
    Ok(fragments)
}
