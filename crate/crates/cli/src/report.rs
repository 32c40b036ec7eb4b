use std::fmt::Write as _;

use spin_wehrl::scenarios::ScenarioResult;

use crate::compare::Comparison;

/// Full-precision number; infinities as `inf`, missing values as `nan`.
pub fn fmt_num(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else if v.is_nan() {
        "nan".to_string()
    } else {
        // no negative zero in the output
        format!("{:.16e}", v + 0.0)
    }
}

fn short(v: f64) -> String {
    if v.is_infinite() || v.is_nan() {
        fmt_num(v)
    } else {
        format!("{:.6e}", v + 0.0)
    }
}

/// Human-readable summary of a run.
pub fn summary(result: &ScenarioResult, comparison: Option<&Comparison>, tolerance: f64) -> String {
    let mut s = String::new();
    let n = result.len();
    let t_end = result.times().last().copied().unwrap_or(0.0);
    let _ = writeln!(s, "scenario        {}", result.name);
    let _ = writeln!(s, "samples         {n} (t = 0 .. {t_end})");
    if let (Some(w), Some(v)) = (result.wehrl.last(), result.von_neumann.last()) {
        let _ = writeln!(
            s,
            "final Pi        wehrl {}  vN {}",
            short(w.pi),
            short(v.pi)
        );
        let _ = writeln!(
            s,
            "final Phi       wehrl {}  vN {}",
            short(w.phi),
            short(v.phi)
        );
        let _ = writeln!(s, "final Phi_E     {}", short(w.phi_energy));
    }
    match result.sigma {
        Some(sigma) => {
            let _ = writeln!(s, "Sigma           {}", short(sigma));
        }
        None => {
            let _ = writeln!(s, "Sigma           n/a (Pi has not decayed by t_max)");
        }
    }
    if let Some(pi) = result.steady_state_pi {
        let _ = writeln!(s, "steady-state Pi {}", short(pi));
    }
    if let Some(m) = result.markovian {
        let _ = writeln!(s, "markovian       {}", if m { "yes" } else { "no" });
    }
    match comparison {
        Some(c) => {
            let _ = writeln!(
                s,
                "method agreement (max deviation over {} samples, tol {tolerance:e})",
                c.times.len()
            );
            for a in &c.agreements {
                let flag = if a.deviation <= tolerance {
                    "ok"
                } else {
                    "EXCEEDS"
                };
                let _ = writeln!(
                    s,
                    "  {:<4}{:>12} vs {:<12}{:>14}  {flag}",
                    a.quantity.as_str(),
                    a.a.as_str(),
                    a.b.as_str(),
                    short(a.deviation)
                );
            }
        }
        None => {
            let _ = writeln!(s, "method agreement n/a");
        }
    }
    s
}
