//! Measure reports: witnessed entanglement together with its closed-form
//! companions across a bipartition.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigensystem, permute_vector, schmidt_decompose, Dims, StateVector};
use crate::partition::PartitionScheme;
use crate::solver::{solve, SolverConfig, WitnessProblem, WitnessResult};
use crate::states::DensityOperator;
use crate::witness::{e_dw, negativity};

/// States with `Tr ρ² >= 1 - PURITY_TOL` count as pure.
pub const PURITY_TOL: f64 = 1e-9;
/// Slack allowed in `e_w >= e_dw` before a report is flagged.
pub const CONSISTENCY_TOL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureSelection {
    pub e_w: bool,
    pub e_dw: bool,
    pub negativity: bool,
    pub random_robustness: bool,
    pub schmidt_product: bool,
}

impl MeasureSelection {
    pub fn all() -> Self {
        MeasureSelection {
            e_w: true,
            e_dw: true,
            negativity: true,
            random_robustness: true,
            schmidt_product: true,
        }
    }

    /// Parses a comma list of `e_w`, `e_dw`, `neg`, `rr`, `schmidt`, or `all`.
    pub fn parse(list: &str) -> Result<Self> {
        let mut sel = MeasureSelection::default();
        for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match name {
                "e_w" => sel.e_w = true,
                "e_dw" => sel.e_dw = true,
                "neg" | "negativity" => sel.negativity = true,
                "rr" | "random_robustness" => sel.random_robustness = true,
                "schmidt" | "schmidt_product" => sel.schmidt_product = true,
                "all" => sel = MeasureSelection::all(),
                other => return Err(Error::Config(format!("unknown measure `{other}`"))),
            }
        }
        if sel == MeasureSelection::default() {
            return Err(Error::Config("no measures selected".into()));
        }
        Ok(sel)
    }

    fn needs_solver(&self) -> bool {
        self.e_w || self.random_robustness
    }
}

/// Seconds spent per measure. `random_robustness` shares the solver run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_w: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_dw: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negativity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schmidt_product: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub e_w: Option<f64>,
    pub e_dw: Option<f64>,
    pub negativity: Option<f64>,
    pub random_robustness: Option<f64>,
    pub schmidt_product: Option<f64>,
    pub scheme: String,
    /// Solver convergence; absent when the solver did not run.
    pub converged: Option<bool>,
    pub cuts_used: Option<usize>,
    /// Set when `e_w < e_dw - 1e-3`, which signals a solver failure.
    pub consistency_warning: bool,
    pub timings: Timings,
}

impl MeasureReport {
    /// The report with timings zeroed, for reproducibility comparisons.
    pub fn without_timings(&self) -> MeasureReport {
        MeasureReport {
            timings: Timings::default(),
            ..self.clone()
        }
    }

    pub fn converged(&self) -> bool {
        self.converged.unwrap_or(true)
    }
}

/// `R(ρ‖I/D) = D·E_W`: the least weight of white noise that makes `ρ` separable.
pub fn random_robustness(rho: &DensityOperator, scheme: &PartitionScheme, config: &SolverConfig) -> Result<f64> {
    let r = run_solver(rho, scheme, config)?;
    Ok(rho.dimension() as f64 * r.e_w)
}

/// Product of the two largest Schmidt coefficients of `psi` across `cut`.
pub fn pure_state_e_w(psi: &StateVector, dims: &Dims, cut: &[usize]) -> Result<f64> {
    let n = dims.parties();
    for &i in cut {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, parties: n });
        }
    }
    let rest: Vec<usize> = (0..n).filter(|i| !cut.contains(i)).collect();
    if cut.is_empty() || rest.is_empty() {
        return Err(Error::InvalidPartition("cut must leave both sides nonempty".into()));
    }
    let mut perm = cut.to_vec();
    perm.extend(&rest);
    let regrouped = permute_vector(psi, dims, &perm)?;
    let bipartite = Dims::new(vec![dims.product_of(cut), dims.product_of(&rest)])?;
    let s = schmidt_decompose(&regrouped, &bipartite)?;
    Ok(match s.coefficients.as_slice() {
        [a1, a2, ..] => a1 * a2,
        _ => 0.0,
    })
}

fn run_solver(rho: &DensityOperator, scheme: &PartitionScheme, config: &SolverConfig) -> Result<WitnessResult> {
    solve(&WitnessProblem::new(rho.clone(), scheme.clone(), config.clone())?)
}

fn bipartition<'a>(scheme: &'a PartitionScheme, what: &str) -> Result<&'a [usize]> {
    scheme.cut().ok_or_else(|| Error::NeedsBipartition(what.into()))
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let t = Instant::now();
    let v = f()?;
    Ok((v, t.elapsed().as_secs_f64()))
}

/// Computes the selected measures of `rho` relative to `scheme`.
pub fn full_report(
    rho: &DensityOperator,
    scheme: &PartitionScheme,
    config: &SolverConfig,
    which: MeasureSelection,
) -> Result<MeasureReport> {
    scheme.check_dims(rho.dims())?;
    // reject unanswerable requests before the expensive part
    let cut = if which.e_dw || which.negativity || which.schmidt_product {
        Some(bipartition(scheme, "e_dw, negativity and schmidt")?)
    } else {
        None
    };
    let top = if which.schmidt_product {
        let purity = rho.purity();
        if purity < 1.0 - PURITY_TOL {
            return Err(Error::NotPure { purity });
        }
        let es = hermitian_eigensystem(rho.matrix())?;
        Some(es.vector(es.values.len() - 1))
    } else {
        None
    };

    let mut timings = Timings::default();
    let solved = if which.needs_solver() {
        let (r, t) = timed(|| run_solver(rho, scheme, config))?;
        timings.e_w = Some(t);
        Some(r)
    } else {
        None
    };
    let e_dw_value = match (which.e_dw, cut) {
        (true, Some(c)) => {
            let (v, t) = timed(|| e_dw(rho, c))?;
            timings.e_dw = Some(t);
            Some(v)
        }
        _ => None,
    };
    let negativity_value = match (which.negativity, cut) {
        (true, Some(c)) => {
            let (v, t) = timed(|| negativity(rho, c))?;
            timings.negativity = Some(t);
            Some(v)
        }
        _ => None,
    };
    let schmidt_value = match (&top, cut) {
        (Some(psi), Some(c)) => {
            let (v, t) = timed(|| pure_state_e_w(psi, rho.dims(), c))?;
            timings.schmidt_product = Some(t);
            Some(v)
        }
        _ => None,
    };

    let e_w_value = solved.as_ref().map(|r| r.e_w);
    let consistency_warning = match (e_w_value, e_dw_value) {
        (Some(w), Some(dw)) => w < dw - CONSISTENCY_TOL,
        _ => false,
    };
    Ok(MeasureReport {
        e_w: if which.e_w { e_w_value } else { None },
        e_dw: e_dw_value,
        negativity: negativity_value,
        random_robustness: if which.random_robustness {
            e_w_value.map(|w| rho.dimension() as f64 * w)
        } else {
            None
        },
        schmidt_product: schmidt_value,
        scheme: scheme.to_string(),
        converged: solved.as_ref().map(|r| r.converged),
        cuts_used: solved.as_ref().map(|r| r.cuts_used),
        consistency_warning,
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{bell_state, bell_vector, ghz_state, werner_state};
    use num_complex::Complex64;

    fn two_qubits() -> PartitionScheme {
        PartitionScheme::m_separable(2, 1).unwrap()
    }

    #[test]
    fn bell_report() {
        let r = full_report(&bell_state(), &two_qubits(), &SolverConfig::default(), MeasureSelection::all()).unwrap();
        assert!((r.e_w.unwrap() - 0.5).abs() < 1e-3);
        assert!((r.e_dw.unwrap() - 0.5).abs() < 1e-12);
        assert!((r.negativity.unwrap() - 0.5).abs() < 1e-12);
        assert!((r.random_robustness.unwrap() - 2.0).abs() < 4e-3);
        assert!((r.schmidt_product.unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(r.converged, Some(true));
        assert!(!r.consistency_warning);
    }

    #[test]
    fn werner_closed_forms() {
        let rho = werner_state(0.6).unwrap();
        let which = MeasureSelection::parse("e_dw,neg").unwrap();
        let r = full_report(&rho, &two_qubits(), &SolverConfig::default(), which).unwrap();
        assert!((r.e_dw.unwrap() - 0.2).abs() < 1e-12);
        assert!((r.negativity.unwrap() - 0.2).abs() < 1e-12);
        assert_eq!(r.e_w, None);
        assert_eq!(r.converged, None);
    }

    #[test]
    fn maximally_mixed_all_zero() {
        let mm = DensityOperator::maximally_mixed(Dims::qubits(2));
        let which = MeasureSelection::parse("e_w,e_dw,neg,rr").unwrap();
        let r = full_report(&mm, &two_qubits(), &SolverConfig::default(), which).unwrap();
        assert!(r.e_w.unwrap() <= 1e-6);
        assert_eq!(r.e_dw, Some(0.0));
        assert_eq!(r.negativity, Some(0.0));
        assert!(r.random_robustness.unwrap() <= 4e-6);
    }

    #[test]
    fn schmidt_values() {
        let d = Dims::qubits(2);
        let mut prod = StateVector::zeros(4);
        prod[0] = Complex64::new(1.0, 0.0);
        assert_eq!(pure_state_e_w(&prod, &d, &[0]).unwrap(), 0.0);
        assert!((pure_state_e_w(&bell_vector(), &d, &[0]).unwrap() - 0.5).abs() < 1e-12);
        let mut v = StateVector::zeros(4);
        v[0] = Complex64::new(0.8f64.sqrt(), 0.0);
        v[3] = Complex64::new(0.2f64.sqrt(), 0.0);
        assert!((pure_state_e_w(&v, &d, &[0]).unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn schmidt_regroups_noncontiguous_cut() {
        // |0>_0 ⊗ |Φ+>_{12}: entangled across {1} but not across {0}
        let d = Dims::qubits(3);
        let mut v = StateVector::zeros(8);
        v[0] = Complex64::new(0.5f64.sqrt(), 0.0);
        v[3] = Complex64::new(0.5f64.sqrt(), 0.0);
        assert!(pure_state_e_w(&v, &d, &[0]).unwrap() < 1e-12);
        assert!((pure_state_e_w(&v, &d, &[1]).unwrap() - 0.5).abs() < 1e-12);
        assert!((pure_state_e_w(&v, &d, &[0, 2]).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ghz_schmidt_on_cut() {
        let scheme = PartitionScheme::bipartite(3, &[0]).unwrap();
        let which = MeasureSelection::parse("schmidt").unwrap();
        let r = full_report(&ghz_state(), &scheme, &SolverConfig::default(), which).unwrap();
        assert!((r.schmidt_product.unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_requests() {
        let mixed = werner_state(0.5).unwrap();
        let sel = MeasureSelection::parse("schmidt").unwrap();
        assert!(matches!(
            full_report(&mixed, &two_qubits(), &SolverConfig::default(), sel),
            Err(Error::NotPure { .. })
        ));
        let tri = PartitionScheme::m_separable(3, 2).unwrap();
        let sel = MeasureSelection::parse("e_dw").unwrap();
        assert!(matches!(
            full_report(&ghz_state(), &tri, &SolverConfig::default(), sel),
            Err(Error::NeedsBipartition(_))
        ));
        assert_eq!(MeasureSelection::parse("all").unwrap(), MeasureSelection::all());
        assert!(MeasureSelection::parse("e_w,bogus").is_err());
        assert!(MeasureSelection::parse("").is_err());
    }

    #[test]
    fn report_without_timings_is_stable() {
        let sel = MeasureSelection::parse("e_dw,neg").unwrap();
        let a = full_report(&bell_state(), &two_qubits(), &SolverConfig::default(), sel).unwrap();
        let b = full_report(&bell_state(), &two_qubits(), &SolverConfig::default(), sel).unwrap();
        assert_eq!(a.without_timings(), b.without_timings());
        let json = serde_json::to_string(&a.without_timings()).unwrap();
        assert!(json.contains("\"e_dw\":0.5"), "{json}");
    }
}
