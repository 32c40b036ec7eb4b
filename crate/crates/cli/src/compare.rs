//! Cross-checks of the Wehrl production and flux computed by independent
//! methods along a trajectory.

use std::io::{self, Write};

use rayon::prelude::*;
use spin_wehrl::phase_space::husimi_adapted;
use spin_wehrl::rates::{
    damping_phi_asymptotic, damping_phi_exact, damping_phi_quadrature, damping_phi_zero_t,
    damping_pi_quadrature, dephasing_pi_quadrature, dephasing_pi_spin_half,
    spin_half_damping_rates,
};
use spin_wehrl::scenarios::ScenarioResult;

use crate::config::MethodName;
use crate::plan::{Channel, Job, Plan};
use crate::report::fmt_num;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Pi,
    Phi,
}

impl Quantity {
    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::Pi => "Pi",
            Quantity::Phi => "Phi",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Series {
    pub quantity: Quantity,
    pub method: MethodName,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct Agreement {
    pub quantity: Quantity,
    pub a: MethodName,
    pub b: MethodName,
    /// `max |a - b|` over the samples divided by the largest `|a|`, `|b|`.
    pub deviation: f64,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub times: Vec<f64>,
    pub series: Vec<Series>,
    pub agreements: Vec<Agreement>,
}

impl Comparison {
    pub fn max_deviation(&self) -> f64 {
        self.agreements
            .iter()
            .map(|a| a.deviation)
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut header = vec!["t".to_string()];
        header.extend(
            self.series
                .iter()
                .map(|s| format!("{}_{}", s.quantity.as_str(), s.method.as_str())),
        );
        writeln!(out, "{}", header.join(","))?;
        for (k, t) in self.times.iter().enumerate() {
            let mut row = vec![fmt_num(*t)];
            row.extend(self.series.iter().map(|s| fmt_num(s.values[k])));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Methods that apply to the job for each quantity, in a fixed order.
fn available(job: &Job, channel: Channel) -> Vec<(Quantity, MethodName)> {
    let half = job.spin.is_half();
    let mut out = Vec::new();
    match channel {
        Channel::None => {}
        Channel::Dephasing { .. } => {
            out.push((Quantity::Pi, MethodName::Quadrature));
            if half {
                out.push((Quantity::Pi, MethodName::ClosedForm));
            }
        }
        Channel::Damping { bath, .. } => {
            out.push((Quantity::Pi, MethodName::Quadrature));
            if half {
                out.push((Quantity::Pi, MethodName::ClosedForm));
            }
            out.push((Quantity::Phi, MethodName::Quadrature));
            if half {
                out.push((Quantity::Phi, MethodName::ClosedForm));
            }
            out.push((Quantity::Phi, MethodName::Exact));
            let thermal =
                !bath.is_zero_temperature() && !matches!(job.plan, Plan::PhotonPulse { .. });
            if thermal {
                out.push((Quantity::Phi, MethodName::Asymptotic));
            }
        }
    }
    out
}

fn sample_indices(n: usize, samples: usize) -> Vec<usize> {
    if n <= samples {
        return (0..n).collect();
    }
    let mut idx: Vec<usize> = (0..samples)
        .map(|i| ((i as f64) * (n - 1) as f64 / (samples - 1) as f64).round() as usize)
        .collect();
    idx.dedup();
    idx
}

fn evaluate(
    job: &Job,
    result: &ScenarioResult,
    k: usize,
    wanted: &[(Quantity, MethodName)],
) -> Result<Vec<f64>, CliError> {
    let t = result.times()[k];
    let rho = &result.trajectory.states[k];
    let channel = job.channel_at(t)?;
    let field = husimi_adapted(rho, &job.grid);
    let bloch = if job.spin.is_half() {
        Some(rho.bloch_vector().map_err(CliError::Numerical)?)
    } else {
        None
    };
    wanted
        .iter()
        .map(|&(q, m)| -> Result<f64, CliError> {
            Ok(match (channel, q, m) {
                (Channel::Dephasing { lambda }, Quantity::Pi, MethodName::Quadrature) => {
                    dephasing_pi_quadrature(&field, lambda)
                }
                (Channel::Dephasing { lambda }, Quantity::Pi, MethodName::ClosedForm) => {
                    dephasing_pi_spin_half(bloch.as_ref().expect("spin-1/2"), lambda)
                }
                (Channel::Damping { bath, .. }, Quantity::Pi, MethodName::Quadrature) => {
                    damping_pi_quadrature(&field, &bath).total
                }
                (Channel::Damping { bath, omega }, Quantity::Pi, MethodName::ClosedForm) => {
                    spin_half_damping_rates(bloch.as_ref().expect("spin-1/2"), &bath, omega).pi
                }
                (Channel::Damping { bath, .. }, Quantity::Phi, MethodName::Quadrature) => {
                    damping_phi_quadrature(&field, &bath)
                }
                (Channel::Damping { bath, omega }, Quantity::Phi, MethodName::ClosedForm) => {
                    spin_half_damping_rates(bloch.as_ref().expect("spin-1/2"), &bath, omega).phi
                }
                (Channel::Damping { bath, .. }, Quantity::Phi, MethodName::Exact) => {
                    if bath.is_zero_temperature() {
                        damping_phi_zero_t(rho.jz_expectation(), bath.gamma, rho.spin())
                    } else {
                        damping_phi_exact(rho, &bath).map_err(CliError::Numerical)?
                    }
                }
                (Channel::Damping { bath, .. }, Quantity::Phi, MethodName::Asymptotic) => {
                    damping_phi_asymptotic(rho, &bath).map_err(CliError::Numerical)?
                }
                _ => f64::NAN,
            })
        })
        .collect()
}

fn deviation(a: &[f64], b: &[f64]) -> f64 {
    let diff = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let scale = a.iter().chain(b).map(|x| x.abs()).fold(0.0, f64::max);
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// Evaluates every applicable method (restricted to `output.methods` when
/// given; the asymptotic flux only when listed there) on evenly strided samples of `result`. Fails with
/// `NothingToCompare` if no quantity has two methods.
pub fn compare(job: &Job, result: &ScenarioResult) -> Result<Comparison, CliError> {
    let channel = job.channel_at(0.0)?;
    let mut wanted = available(job, channel);
    match &job.config.output.methods {
        Some(methods) => wanted.retain(|(_, m)| methods.contains(m)),
        // approximate; only on request
        None => wanted.retain(|(_, m)| *m != MethodName::Asymptotic),
    }
    let count = |q: Quantity| wanted.iter().filter(|(x, _)| *x == q).count();
    if count(Quantity::Pi) < 2 && count(Quantity::Phi) < 2 {
        return Err(CliError::NothingToCompare(format!(
            "scenario {} has fewer than two applicable methods per quantity",
            job.config.scenario
        )));
    }
    let idx = sample_indices(result.len(), job.config.compare.samples);
    let rows: Vec<Vec<f64>> = idx
        .par_iter()
        .map(|&k| evaluate(job, result, k, &wanted))
        .collect::<Result<_, _>>()?;
    let series: Vec<Series> = wanted
        .iter()
        .enumerate()
        .map(|(i, &(quantity, method))| Series {
            quantity,
            method,
            values: rows.iter().map(|r| r[i]).collect(),
        })
        .collect();
    let mut agreements = Vec::new();
    for (i, a) in series.iter().enumerate() {
        for b in &series[i + 1..] {
            if a.quantity == b.quantity {
                agreements.push(Agreement {
                    quantity: a.quantity,
                    a: a.method,
                    b: b.method,
                    deviation: deviation(&a.values, &b.values),
                });
            }
        }
    }
    Ok(Comparison {
        times: idx.iter().map(|&k| result.times()[k]).collect(),
        series,
        agreements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strided_samples_cover_both_ends() {
        assert_eq!(sample_indices(5, 10), vec![0, 1, 2, 3, 4]);
        let idx = sample_indices(1001, 11);
        assert_eq!(idx.first(), Some(&0));
        assert_eq!(idx.last(), Some(&1000));
        assert_eq!(idx.len(), 11);
    }

    #[test]
    fn deviation_is_scaled_by_the_series_peak() {
        assert_eq!(deviation(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        assert!((deviation(&[0.0, 4.0], &[0.1, 4.0]) - 0.025).abs() < 1e-15);
        assert_eq!(deviation(&[0.0], &[0.0]), 0.0);
    }
}
