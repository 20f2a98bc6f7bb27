use serde::Serialize;
use serde_json::json;

use super::Report;
use crate::error::{Error, Result};
use crate::laws::DiscreteLaw;
use crate::riskmeasures::{phi_example, rho_example};

pub const EXAMPLE_IDS: [&str; 2] = ["ex-key-example", "ex-quasiconv"];

const TOL: f64 = 1e-12;
const T_GRID: [f64; 4] = [0.0, 1.0, 2.0, 5.0];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReproLine {
    pub id: String,
    pub claim: String,
    pub computed: f64,
    /// `None` for informational lines that are not asserted.
    pub expected: Option<f64>,
    pub tol: f64,
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn check(id: &str, claim: impl Into<String>, computed: f64, expected: f64) -> ReproLine {
    ReproLine {
        id: id.into(),
        claim: claim.into(),
        computed,
        expected: Some(expected),
        tol: TOL,
        pass: Some((computed - expected).abs() <= TOL),
        note: None,
    }
}

fn law(atoms: &[(f64, f64)]) -> DiscreteLaw<f64> {
    DiscreteLaw::new(atoms.iter().copied()).expect("example laws are valid")
}

fn z() -> DiscreteLaw<f64> {
    law(&[(-1.0, 2.0 / 3.0), (2.0, 1.0 / 3.0)])
}

fn key_example() -> Vec<ReproLine> {
    let id = "ex-key-example";
    let x = law(&[(-6.0, 0.5), (4.0, 0.5)]);
    let y = DiscreteLaw::point(-1.0);
    let mut lines = vec![
        check(id, "E[Z] = 0", z().mean(), 0.0),
        check(id, "rho(Z) = 1/2", rho_example(&z()), 0.5),
    ];
    for t in T_GRID {
        lines.push(check(id, format!("phi(t Z) = 0 at t = {t}"), phi_example(&z().affine(t, 0.0)), 0.0));
    }
    lines.extend([
        check(id, "E[X] = -1", x.mean(), -1.0),
        check(id, "E[Y] = -1", y.mean(), -1.0),
        check(id, "phi(X) = 0", phi_example(&x), 0.0),
        check(id, "phi(Y) = -1", phi_example(&y), -1.0),
        check(id, "rho(Y) = -1", rho_example(&y), -1.0),
        ReproLine {
            id: id.into(),
            claim: "rho(X)".into(),
            computed: rho_example(&x),
            expected: None,
            tol: TOL,
            pass: None,
            note: Some(
                "the worked example states rho(X) = 0; direct evaluation gives 1/2 E[X] + 1/2 * 4 = 3/2. \
                 phi(X) = 0 holds either way since rho(X) >= 0"
                    .into(),
            ),
        },
    ]);
    lines
}

fn quasiconv() -> Vec<ReproLine> {
    let id = "ex-quasiconv";
    let u = law(&[(0.0, 0.5), (4.0, 0.5)]);
    let mut lines = vec![check(id, "E[U] = 2", u.mean(), 2.0)];
    for t in T_GRID {
        lines.push(check(id, format!("phi(-t U) = -t at t = {t}"), phi_example(&u.affine(-t, 0.0)), 0.0 - t));
        lines.push(check(id, format!("phi(t U) = t at t = {t}"), phi_example(&u.affine(t, 0.0)), t));
    }
    for t in T_GRID {
        lines.push(check(id, format!("rho(-t Z) = t/2 at t = {t}"), rho_example(&z().affine(-t, 0.0)), t / 2.0));
        lines.push(check(id, format!("phi(-t Z) = 0 at t = {t}"), phi_example(&z().affine(-t, 0.0)), 0.0));
    }
    lines
}

/// Report lines for one example id or `all`.
pub fn repro_lines(id: &str) -> Result<Vec<ReproLine>> {
    match id {
        "all" => Ok(key_example().into_iter().chain(quasiconv()).collect()),
        "ex-key-example" => Ok(key_example()),
        "ex-quasiconv" => Ok(quasiconv()),
        _ => Err(Error::domain(format!(
            "unknown example id {id:?}; expected one of {} or all",
            EXAMPLE_IDS.join(", ")
        ))),
    }
}

pub(super) fn repro_report(id: &str) -> Result<(Report, bool)> {
    let lines = repro_lines(id)?;
    let ok = lines.iter().all(|l| l.pass != Some(false));
    let mut text = String::new();
    for l in &lines {
        let status = match l.pass {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "INFO",
        };
        text.push_str(&format!("{status} {} {}: computed {}", l.id, l.claim, l.computed));
        if let Some(e) = l.expected {
            text.push_str(&format!(", expected {e}"));
        }
        if let Some(n) = &l.note {
            text.push_str(&format!(" ({n})"));
        }
        text.push('\n');
    }
    let json = json!({ "target": id, "lines": lines, "pass": ok });
    Ok((Report::new(text, json), ok))
}
