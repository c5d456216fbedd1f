//! Parameter sweeps over one-parameter state families.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::PartitionScheme;
use crate::rng::derive_seed;
use crate::solver::{solve, SolverConfig, WitnessProblem};
use crate::states::{wghz_mixture, DensityOperator};
use crate::witness::e_dw;

pub const DEFAULT_POINTS: usize = 51;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// `(1-p)|W⟩⟨W| + p|GHZ⟩⟨GHZ|` on three qubits.
    Wghz,
}

impl Family {
    pub fn state(&self, p: f64) -> Result<DensityOperator> {
        match self {
            Family::Wghz => wghz_mixture(p),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wghz" => Ok(Family::Wghz),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

/// Output columns of a three-qubit sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Column {
    /// `E_W` against all 2-separable partitions.
    Tri,
    /// `E_W` across the fixed cut `{0,1}|{2}`.
    Cut,
    /// `E_W` of the two-qubit marginal on parties 0 and 1.
    Reduced,
    /// `E_{d-W}` across `{0,1}|{2}`.
    DwCut,
}

impl Column {
    pub const ALL: [Column; 4] = [Column::Tri, Column::Cut, Column::Reduced, Column::DwCut];

    pub fn name(&self) -> &'static str {
        match self {
            Column::Tri => "tri",
            Column::Cut => "cut",
            Column::Reduced => "reduced",
            Column::DwCut => "dw_cut",
        }
    }

    /// Parses a comma list; the result is in canonical column order.
    pub fn parse_list(list: &str) -> Result<Vec<Column>> {
        let mut cols = Vec::new();
        for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let c = Column::ALL
                .into_iter()
                .find(|c| c.name() == name)
                .ok_or_else(|| Error::Config(format!("unknown sweep column `{name}`")))?;
            if !cols.contains(&c) {
                cols.push(c);
            }
        }
        if cols.is_empty() {
            return Err(Error::Config("no sweep columns selected".into()));
        }
        cols.sort();
        Ok(cols)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub family: Family,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub columns: Vec<Column>,
    pub config: SolverConfig,
}

impl SweepSpec {
    pub fn new(family: Family, points: usize, columns: Vec<Column>, config: SolverConfig) -> Self {
        SweepSpec {
            family,
            start: 0.0,
            stop: 1.0,
            points,
            columns,
            config,
        }
    }

    fn check(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::Config(format!("need at least 2 points, got {}", self.points)));
        }
        if !(0.0..=1.0).contains(&self.start) || !(0.0..=1.0).contains(&self.stop) || self.start >= self.stop {
            return Err(Error::Config(format!(
                "grid [{}, {}] must satisfy 0 <= start < stop <= 1",
                self.start, self.stop
            )));
        }
        if self.columns.is_empty() {
            return Err(Error::Config("no sweep columns selected".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| if i + 1 == self.points { self.stop } else { self.start + (self.stop - self.start) * (i as f64 / last) })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub p: f64,
    /// One value per requested column, in column order.
    pub values: Vec<f64>,
    /// False when any solver run at this point hit its cut budget.
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub columns: Vec<Column>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }

    pub fn column(&self, c: Column) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|&x| x == c)?;
        Some(self.rows.iter().map(|r| r.values[k]).collect())
    }

    /// CSV with a header row and LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p");
        for c in &self.columns {
            out.push(',');
            out.push_str(c.name());
        }
        out.push('\n');
        for r in &self.rows {
            write!(out, "{}", r.p).unwrap();
            for v in &r.values {
                write!(out, ",{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

const CUT: [usize; 2] = [0, 1];

fn point(spec: &SweepSpec, index: usize, p: f64) -> Result<SweepRow> {
    let rho = spec.family.state(p)?;
    let config = spec.config.clone().with_seed(derive_seed(spec.config.seed, index as u64));
    let mut converged = true;
    let mut witnessed = |rho: &DensityOperator, scheme: PartitionScheme| -> Result<f64> {
        let r = solve(&WitnessProblem::new(rho.clone(), scheme, config.clone())?)?;
        converged &= r.converged;
        Ok(r.e_w)
    };
    let mut values = Vec::with_capacity(spec.columns.len());
    for c in &spec.columns {
        values.push(match c {
            Column::Tri => witnessed(&rho, PartitionScheme::m_separable(3, 2)?)?,
            Column::Cut => witnessed(&rho, PartitionScheme::bipartite(3, &CUT)?)?,
            Column::Reduced => witnessed(&rho.reduced(&CUT)?, PartitionScheme::m_separable(2, 1)?)?,
            Column::DwCut => e_dw(&rho, &CUT)?,
        });
    }
    Ok(SweepRow { p, values, converged })
}

/// Evaluates every grid point; rows come back in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.check()?;
    spec.config.check()?;
    let rows = spec
        .grid()
        .into_par_iter()
        .enumerate()
        .map(|(i, p)| point(spec, i, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        columns: spec.columns.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints() {
        let spec = SweepSpec::new(Family::Wghz, 51, vec![Column::DwCut], SolverConfig::default());
        let g = spec.grid();
        assert_eq!(g.len(), 51);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[50], 1.0);
        assert!((g[25] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn column_parsing() {
        assert_eq!(
            Column::parse_list("dw_cut,tri").unwrap(),
            vec![Column::Tri, Column::DwCut]
        );
        assert!(Column::parse_list("tri,xyz").is_err());
        assert!(Column::parse_list("").is_err());
        assert!("ghzw".parse::<Family>().is_err());
    }

    #[test]
    fn rejects_bad_specs() {
        let mut spec = SweepSpec::new(Family::Wghz, 1, vec![Column::DwCut], SolverConfig::default());
        assert!(run_sweep(&spec).is_err());
        spec.points = 3;
        spec.start = 0.7;
        spec.stop = 0.2;
        assert!(run_sweep(&spec).is_err());
    }

    #[test]
    fn closed_form_column_csv() {
        let spec = SweepSpec::new(Family::Wghz, 3, vec![Column::DwCut], SolverConfig::default());
        let t = run_sweep(&spec).unwrap();
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "p,dw_cut");
        assert_eq!(lines.len(), 4);
        assert!(!csv.contains('\r'));
        // W state across {0,1}|{2}: a1 a2 = √2/3
        let dw = t.column(Column::DwCut).unwrap();
        assert!((dw[0] - 2f64.sqrt() / 3.0).abs() < 1e-12);
        assert!((dw[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn endpoint_rows() {
        let spec = SweepSpec::new(
            Family::Wghz,
            2,
            vec![Column::Cut, Column::Reduced, Column::DwCut],
            SolverConfig::default(),
        );
        let t = run_sweep(&spec).unwrap();
        assert!(t.converged());
        let cut = t.column(Column::Cut).unwrap();
        let red = t.column(Column::Reduced).unwrap();
        assert!((cut[0] - 2f64.sqrt() / 3.0).abs() < 2e-3);
        assert!(red[1].abs() < 1e-6);
        assert!((cut[1] - 0.5).abs() < 2e-3);
    }
}
