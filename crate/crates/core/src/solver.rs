//! Optimal entanglement witnesses by cutting-plane linear programming.
//!
//! The witness is written as `W = I/D + Σ_i y_i B_i` over the traceless part
//! of an orthonormal Hermitian basis, which fixes `Tr W = 1`. The program
//! minimizes `Tr(Wρ)` subject to `<π|W|π> >= 0` for a growing set of product
//! vectors `π`; the separation oracle supplies new constraints until no
//! conforming product vector violates the current solution.

use serde::{Deserialize, Serialize};

use crate::basis::HermitianBasis;
use crate::error::{Error, Result};
use crate::lp::CuttingPlaneLp;
use crate::oracle::{violation_oracle_with_starts, LocalMinimum, OracleOutcome};
use crate::partition::{PartitionScheme, ProductVector};
use crate::rng::{derive_seed, rng};
use crate::states::DensityOperator;
use crate::witness::{evaluate, Witness};

/// Number of initial constraints per basis element.
pub const SEED_FACTOR: usize = 10;
const MAX_KAPPA_DOUBLINGS: usize = 40;
/// Weight of the feasible center in the separation point.
const IN_OUT_WEIGHT: f64 = 0.5;
/// Consecutive rounds without a new cut before giving up.
const MAX_IDLE_ROUNDS: usize = 64;
/// Share of random restarts used while warm starts are available.
const LIGHT_RESTART_DIVISOR: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub eps_feasibility: f64,
    pub eps_objective: f64,
    pub max_cuts: usize,
    pub restarts: usize,
    /// Box bound on basis coordinates; `None` means `D`.
    pub trust_bound: Option<f64>,
    pub seed: u64,
    /// Most cuts taken from one oracle call.
    pub cuts_per_round: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            eps_feasibility: 1e-6,
            eps_objective: 1e-6,
            max_cuts: 5000,
            restarts: 20,
            trust_bound: None,
            seed: 0,
            cuts_per_round: 8,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn check(&self) -> Result<()> {
        if !(self.eps_feasibility > 0.0) || !(self.eps_objective > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be at least 1".into()));
        }
        if self.cuts_per_round == 0 {
            return Err(Error::Config("cuts_per_round must be at least 1".into()));
        }
        if let Some(k) = self.trust_bound {
            if !(k > 0.0) || !k.is_finite() {
                return Err(Error::Config(format!("trust bound {k} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct WitnessProblem {
    pub rho: DensityOperator,
    pub scheme: PartitionScheme,
    pub config: SolverConfig,
}

impl WitnessProblem {
    pub fn new(rho: DensityOperator, scheme: PartitionScheme, config: SolverConfig) -> Result<Self> {
        scheme.check_dims(rho.dims())?;
        config.check()?;
        Ok(WitnessProblem { rho, scheme, config })
    }
}

#[derive(Clone, Debug)]
pub struct WitnessResult {
    pub witness: Witness,
    /// `max(0, -Tr(Wρ))` for the returned witness.
    pub e_w: f64,
    /// Value of the final relaxation, an upper bound on `E_W` up to LP tolerance.
    pub relaxation_bound: f64,
    pub converged: bool,
    pub cuts_used: usize,
    pub rounds: usize,
    /// Most negative product vector found for the final relaxation.
    pub certificate: ProductVector,
    /// `<π|W|π>` of the certificate under the returned witness.
    pub certificate_value: f64,
    /// `Tr(Wρ)` of each relaxation solved.
    pub objective_history: Vec<f64>,
    pub kappa: f64,
}

impl WitnessResult {
    pub fn detected(&self) -> bool {
        self.e_w > 0.0
    }
}

fn distinct(a: &ProductVector, b: &ProductVector) -> bool {
    a.partition() != b.partition() || a.assembled().dotc(b.assembled()).norm_sqr() < 1.0 - 1e-8
}

fn pick_cuts(minima: &[LocalMinimum], threshold: f64, limit: usize) -> Vec<ProductVector> {
    let mut picked: Vec<ProductVector> = Vec::new();
    for m in minima {
        if m.value >= threshold || picked.len() >= limit {
            break;
        }
        if picked.iter().all(|p| distinct(p, &m.vector)) {
            picked.push(m.vector.clone());
        }
    }
    picked
}

/// Best witness known to pass the oracle, in basis coordinates.
struct Center {
    y: Vec<f64>,
    value: f64,
}

/// Runs the cutting-plane loop for one problem.
///
/// Separation happens at a point between the LP solution and the best
/// oracle-feasible witness found so far. The loop stops once that witness is
/// within `eps_objective` of the LP bound.
pub fn solve(problem: &WitnessProblem) -> Result<WitnessResult> {
    let WitnessProblem { rho, scheme, config } = problem;
    let dims = rho.dims();
    let d = dims.total();
    let inv_d = 1.0 / d as f64;
    let basis = HermitianBasis::new(d);
    let coords = basis.coordinates(rho.matrix());
    let cost = &coords[1..];
    let mut kappa = config.trust_bound.unwrap_or(d as f64);
    let mut lp = CuttingPlaneLp::new(cost.to_vec(), kappa)?;
    let objective = |y: &[f64]| inv_d + cost.iter().zip(y).map(|(c, y)| c * y).sum::<f64>();
    let row_of = |pv: &ProductVector| basis.quadratic_row(pv.assembled())[1..].to_vec();

    let mut seed_rng = rng(derive_seed(config.seed, 0));
    let parts = scheme.partitions();
    for i in 0..SEED_FACTOR * d * d {
        let pv = ProductVector::random(dims, &parts[i % parts.len()], &mut seed_rng)?;
        lp.add_cut(&row_of(&pv), -inv_d)?;
    }

    let assemble = |y: &[f64]| -> Result<Witness> {
        let mut x = Vec::with_capacity(y.len() + 1);
        x.push(1.0 / (d as f64).sqrt());
        x.extend_from_slice(y);
        Witness::new(basis.assemble(&x), dims.clone())
    };
    // cheap searches lean on warm starts; a clean result is confirmed by the full search
    let light = (config.restarts / LIGHT_RESTART_DIVISOR).max(1);
    let search = |y: &[f64], seed: u64, warm: &[ProductVector]| -> Result<OracleOutcome> {
        let w = assemble(y)?;
        let first = if warm.is_empty() { config.restarts } else { light };
        let mut out = violation_oracle_with_starts(&w, scheme, first, seed, warm)?;
        if first < config.restarts && out.value >= -config.eps_feasibility {
            out = violation_oracle_with_starts(&w, scheme, config.restarts, seed, warm)?;
        }
        Ok(out)
    };
    // `(W - vI)/(1 - vD)` in coordinates: the traceless part shrinks toward I/D
    let lift = |y: &[f64], v: f64| -> Vec<f64> {
        let scale = if v < 0.0 { 1.0 / (1.0 - v * d as f64) } else { 1.0 };
        y.iter().map(|x| x * scale).collect()
    };
    // points within tolerance are taken as they are; the returned witness is lifted at the end
    let repair = |y: &[f64], v: f64| -> Vec<f64> {
        if v >= -config.eps_feasibility {
            y.to_vec()
        } else {
            lift(y, v)
        }
    };
    let offer = |center: &mut Center, y: Vec<f64>| {
        let value = objective(&y);
        if value < center.value {
            *center = Center { y, value };
        }
    };

    let mut center = Center {
        y: vec![0.0; d * d - 1],
        value: inv_d,
    };
    let mut history = Vec::new();
    let mut warm: Vec<ProductVector> = Vec::new();
    let mut cuts_used = 0;
    let mut doublings = 0;
    let mut round = 0;
    let mut idle = 0;
    let converged = loop {
        round += 1;
        let sol = lp.solve()?;
        let bound = inv_d + sol.objective;
        history.push(bound);
        if center.value - bound <= config.eps_objective {
            // a bound from a boxed relaxation is only valid off the box
            if sol.at_bound && doublings < MAX_KAPPA_DOUBLINGS {
                kappa *= 2.0;
                doublings += 1;
                lp.set_kappa(kappa);
                continue;
            }
            break true;
        }
        if cuts_used >= config.max_cuts {
            break false;
        }
        let seed = derive_seed(config.seed, round as u64);
        let probe: Vec<f64> = center
            .y
            .iter()
            .zip(&sol.y)
            .map(|(c, y)| IN_OUT_WEIGHT * c + (1.0 - IN_OUT_WEIGHT) * y)
            .collect();
        let outcome = search(&probe, seed, &warm)?;
        offer(&mut center, repair(&probe, outcome.value));
        if outcome.value >= -config.eps_feasibility {
            idle += 1;
            if idle > MAX_IDLE_ROUNDS {
                break false;
            }
            continue;
        }
        idle = 0;
        let room = config.max_cuts - cuts_used;
        let limit = config.cuts_per_round.min(room);
        let mut cuts = pick_cuts(&outcome.minima, -config.eps_feasibility, limit);
        let separates = |pv: &ProductVector| {
            let row = row_of(pv);
            inv_d + row.iter().zip(&sol.y).map(|(a, y)| a * y).sum::<f64>() < -config.eps_feasibility
        };
        if !cuts.iter().any(separates) {
            let direct = search(&sol.y, derive_seed(seed, 1), &cuts)?;
            offer(&mut center, repair(&sol.y, direct.value));
            let more = pick_cuts(&direct.minima, -config.eps_feasibility, room.saturating_sub(cuts.len()).min(limit));
            cuts.extend(more);
        }
        for pv in &cuts {
            lp.add_cut(&row_of(pv), -inv_d)?;
        }
        cuts_used += cuts.len();
        warm = cuts;
    };

    // certify the returned witness with a search of its own
    let final_seed = derive_seed(config.seed, u64::MAX);
    let outcome = violation_oracle_with_starts(&assemble(&center.y)?, scheme, config.restarts, final_seed, &warm)?;
    let witness = assemble(&lift(&center.y, outcome.value))?;
    let value = evaluate(&witness, rho)?;
    let certificate_value = witness.expectation(&outcome.argmin);
    let relaxation = *history.last().expect("at least one round");
    Ok(WitnessResult {
        e_w: (-value).max(0.0),
        relaxation_bound: (-relaxation).max(0.0),
        converged,
        cuts_used,
        rounds: round,
        certificate: outcome.argmin,
        certificate_value,
        objective_history: history,
        kappa,
        witness,
    })
}

/// Witnessed entanglement of `rho` relative to `scheme`.
pub fn e_w(rho: &DensityOperator, scheme: &PartitionScheme, config: &SolverConfig) -> Result<f64> {
    let problem = WitnessProblem::new(rho.clone(), scheme.clone(), config.clone())?;
    Ok(solve(&problem)?.e_w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Dims;
    use crate::states::{bell_state, computational_basis_state, ghz_state, w_state};

    fn run(rho: DensityOperator, scheme: PartitionScheme) -> WitnessResult {
        let p = WitnessProblem::new(rho, scheme, SolverConfig::default()).unwrap();
        solve(&p).unwrap()
    }

    #[test]
    fn separable_product_state() {
        let r = run(
            computational_basis_state(&Dims::qubits(2), 0).unwrap(),
            PartitionScheme::m_separable(2, 1).unwrap(),
        );
        assert!(r.converged);
        assert!(r.e_w <= 1e-6, "e_w = {}", r.e_w);
    }

    #[test]
    fn bell_state_value() {
        let r = run(bell_state(), PartitionScheme::m_separable(2, 1).unwrap());
        assert!(r.converged);
        assert!((r.e_w - 0.5).abs() < 1e-3, "e_w = {}", r.e_w);
        assert!(r.certificate_value >= -1e-6);
        let recomputed = (-evaluate(&r.witness, &bell_state()).unwrap()).max(0.0);
        assert!((recomputed - r.e_w).abs() < 1e-12);
        assert!(r.relaxation_bound + 1e-9 >= r.e_w);
    }

    #[test]
    fn ghz_across_fixed_cut() {
        let r = run(ghz_state(), PartitionScheme::bipartite(3, &[0]).unwrap());
        assert!((r.e_w - 0.5).abs() < 1e-3, "e_w = {}", r.e_w);
    }

    #[test]
    fn w_state_across_fixed_cut() {
        let r = run(w_state(), PartitionScheme::bipartite(3, &[0]).unwrap());
        let want = 2f64.sqrt() / 3.0;
        assert!((r.e_w - want).abs() < 1e-3, "e_w = {}", r.e_w);
    }

    #[test]
    fn maximally_mixed_is_zero() {
        let mm = DensityOperator::maximally_mixed(Dims::qubits(3));
        for scheme in [
            PartitionScheme::m_separable(3, 1).unwrap(),
            PartitionScheme::m_separable(3, 2).unwrap(),
        ] {
            assert_eq!(e_w(&mm, &scheme, &SolverConfig::default()).unwrap(), 0.0);
        }
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = SolverConfig {
            restarts: 0,
            ..SolverConfig::default()
        };
        assert!(WitnessProblem::new(bell_state(), PartitionScheme::m_separable(2, 1).unwrap(), cfg).is_err());
        assert!(WitnessProblem::new(
            bell_state(),
            PartitionScheme::m_separable(3, 1).unwrap(),
            SolverConfig::default()
        )
        .is_err());
    }
}
