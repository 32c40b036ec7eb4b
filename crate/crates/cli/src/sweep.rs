//! Parameter sweeps: one summary row per point of the cartesian product of
//! the sweep axes, first axis outermost.

use std::io::{self, Write};

use rayon::prelude::*;
use spin_wehrl::scenarios::ScenarioResult;

use crate::config::{ConfigSource, SweepAxis, SweepValues};
use crate::plan::build;
use crate::report::fmt_num;
use crate::CliError;

/// Summary columns available to a sweep table.
pub const COLUMNS: [&str; 16] = [
    "S_wehrl_0",
    "Pi_wehrl_0",
    "Phi_wehrl_0",
    "Pi_vN_0",
    "Phi_vN_0",
    "Phi_E_0",
    "t_final",
    "tau_z_final",
    "S_wehrl_final",
    "Pi_wehrl_final",
    "Phi_wehrl_final",
    "Pi_vN_final",
    "Phi_vN_final",
    "Phi_E_final",
    "Sigma",
    "steady_state_Pi",
];

fn summary_row(r: &ScenarioResult) -> [f64; 16] {
    let (w0, v0) = (&r.wehrl[0], &r.von_neumann[0]);
    let last = r.len() - 1;
    let (w1, v1) = (&r.wehrl[last], &r.von_neumann[last]);
    [
        r.s_wehrl[0],
        w0.pi,
        w0.phi,
        v0.pi,
        v0.phi,
        w0.phi_energy,
        r.times()[last],
        r.polarization[last][2],
        r.s_wehrl[last],
        w1.pi,
        w1.phi,
        v1.pi,
        v1.phi,
        w1.phi_energy,
        r.sigma.unwrap_or(f64::NAN),
        r.steady_state_pi.unwrap_or(f64::NAN),
    ]
}

#[derive(Debug, Clone)]
pub struct SweepTable {
    pub params: Vec<String>,
    pub columns: Vec<String>,
    /// Parameter values followed by the selected columns.
    pub rows: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let header: Vec<&str> = self
            .params
            .iter()
            .chain(&self.columns)
            .map(String::as_str)
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| fmt_num(*v)).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

fn product(axes: &[(String, Vec<f64>)]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, (_, values)| {
        acc.iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(*v);
                    p
                })
            })
            .collect()
    })
}

/// Runs the sweep. `axes` overrides the `[[sweep]]` entries of the config
/// when non-empty.
pub fn sweep(source: &ConfigSource, axes: &[SweepAxis]) -> Result<SweepTable, CliError> {
    let base = source.config()?;
    let axes: Vec<(String, Vec<f64>)> = if axes.is_empty() {
        &base.sweep[..]
    } else {
        axes
    }
    .iter()
    .map(|a| (a.param.clone(), a.values.values()))
    .collect();
    if axes.is_empty() {
        return Err(CliError::Config(
            "sweep: no parameter given (use --param or a [[sweep]] table)".into(),
        ));
    }
    for (param, values) in &axes {
        if values.is_empty() {
            return Err(CliError::Config(format!("sweep: no values for `{param}`")));
        }
        // reject unknown names before running anything
        let mut probe = source.clone();
        probe.set_param(param, values[0])?;
    }
    let selected: Vec<usize> = match &base.output.sweep_columns {
        Some(cols) => cols
            .iter()
            .map(|c| {
                COLUMNS.iter().position(|k| k == c).ok_or_else(|| {
                    CliError::Config(format!("output.sweep_columns: unknown column `{c}`"))
                })
            })
            .collect::<Result<_, _>>()?,
        None => (0..COLUMNS.len()).collect(),
    };
    let points = product(&axes);
    let rows: Vec<Vec<f64>> = points
        .par_iter()
        .map(|point| -> Result<Vec<f64>, CliError> {
            let mut src = source.clone();
            for ((param, _), v) in axes.iter().zip(point) {
                src.set_param(param, *v)?;
            }
            let at = || {
                axes.iter()
                    .zip(point)
                    .map(|((p, _), v)| format!("{p} = {v}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            let job = build(&src.config()?).map_err(|e| e.context(&at()))?;
            let result = job.run().map_err(|e| e.context(&at()))?;
            let summary = summary_row(&result);
            let mut row = point.clone();
            row.extend(selected.iter().map(|&i| summary[i]));
            Ok(row)
        })
        .collect::<Result<_, _>>()?;
    Ok(SweepTable {
        params: axes.iter().map(|(p, _)| p.clone()).collect(),
        columns: selected.iter().map(|&i| COLUMNS[i].to_string()).collect(),
        rows,
    })
}

/// Builds axes from `--param`/`--values` pairs.
pub fn axes_from_args(params: &[String], values: &[String]) -> Result<Vec<SweepAxis>, CliError> {
    if params.len() != values.len() {
        return Err(CliError::Config(
            "each --param needs exactly one --values list".into(),
        ));
    }
    params
        .iter()
        .zip(values)
        .map(|(p, v)| {
            Ok(SweepAxis {
                param: p.clone(),
                values: SweepValues::List(crate::config::parse_values(v)?),
            })
        })
        .collect()
}
