//! The exact-identity suite behind `plaquette verify`. Enumeration checks use
//! no randomness; the random configurations and complexes come from fixed
//! internal seeds, so the report does not depend on `--seed`.

use serde::Serialize;
use serde_json::{json, Value};

use plaquette_core::cubical::{build_grid, build_torus, Boundary, Chain, Complex};
use plaquette_core::duality::{dual_p, p_sd, verify_duality_at};
use plaquette_core::field::PrimeField;
use plaquette_core::homology::{
    alexander_check, betti, eta_offset_constant, euler_poincare_check, ChainComplex, Subcomplex,
};
use plaquette_core::linalg::dense;
use plaquette_core::pltg::heatbath::heat_bath_sweep_kernel;
use plaquette_core::pltg::{bond_probability, exact_coupling, exact_gibbs, sw_transition_kernel, wilson_identity};
use plaquette_core::rcm::probes::{fkg_probe, q_monotonicity_probe};
use plaquette_core::rcm::{exact_distribution, RcmParams};
use plaquette_core::rng::{below, chain_rng, uniform, ChainRng};
use plaquette_core::stats::total_variation;

use crate::CliError;

pub const GROUPS: [&str; 7] = ["duality", "partition", "alexander", "coupling", "sw-stationarity", "homology", "fkg"];

/// Internal seed of the random-configuration checks.
const SUITE_SEED: u64 = 0x5eed;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub group: &'static str,
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value <= tolerance`.
    fn at_most(group: &'static str, name: String, value: f64, tolerance: f64) -> Check {
        Check { group, name, value, tolerance, passed: value <= tolerance }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Fault {
    #[default]
    None,
    /// Scale the dual-side open probability so the dual weights are wrong.
    Weight,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Suite {
    pub groups: Vec<&'static str>,
    pub alexander_configs: usize,
    pub random_complexes: usize,
    pub fault: Fault,
}

impl Default for Suite {
    fn default() -> Self {
        Suite { groups: GROUPS.to_vec(), alexander_configs: 500, random_complexes: 500, fault: Fault::None }
    }
}

fn f(q: u64) -> PrimeField {
    PrimeField::new(q).expect("prime")
}

pub fn run(suite: &Suite) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for &g in &suite.groups {
        match g {
            "duality" | "partition" => duality(g, suite.fault, &mut out)?,
            "alexander" => alexander(suite.alexander_configs, &mut out)?,
            "coupling" => coupling(&mut out)?,
            "sw-stationarity" => stationarity(&mut out)?,
            "homology" => homology(suite.random_complexes, &mut out)?,
            "fkg" => fkg(&mut out)?,
            other => return Err(CliError::Usage(format!("unknown check group {other:?}"))),
        }
    }
    Ok(out)
}

pub fn report(checks: &[Check], meta: Value) -> Value {
    let failed = checks.iter().filter(|c| !c.passed).count();
    json!({ "meta": meta, "passed": failed == 0, "n_checks": checks.len(), "n_failed": failed, "checks": checks })
}

fn duality(group: &'static str, fault: Fault, out: &mut Vec<Check>) -> Result<(), CliError> {
    let t = build_torus(2, 2, 2)?;
    for q in [1u64, 2, 3] {
        let field = if q == 1 { f(2) } else { f(q) };
        for p in [0.3, p_sd(q as f64), 0.7] {
            let mut p_star = dual_p(p, q as f64);
            if fault == Fault::Weight {
                p_star *= 0.97;
            }
            let r = verify_duality_at(&t, 1, q as f64, p, p_star, field)?;
            let name = format!("T2_2 i=1 q={q} p={p:.5}");
            if group == "duality" {
                out.push(Check::at_most(group, format!("{name} tv"), r.tv, 1e-12));
            } else {
                out.push(Check::at_most(group, format!("{name} partition ratio"), r.partition_rel_error, 1e-10));
            }
        }
    }
    Ok(())
}

/// Random configuration with a uniformly drawn density.
pub fn random_config(n: usize, rng: &mut ChainRng) -> Vec<bool> {
    let u = uniform(rng);
    (0..n).map(|_| uniform(rng) < u).collect()
}

/// Counts configurations violating any of Eqs. (1)-(3), the `η` offset or
/// Euler–Poincaré on `P` and its dual.
pub fn alexander_failures(complex: &Complex, i: usize, field: PrimeField, n: usize, rng: &mut ChainRng) -> Result<usize, CliError> {
    let c = eta_offset_constant(complex, i, field)?;
    let d = complex.d();
    let mut bad = 0;
    for _ in 0..n {
        let open = random_config(complex.num_cells(i), rng);
        let r = alexander_check(complex, i, &open, field)?;
        let dual = complex.dual_complex(i, &open)?;
        let euler = euler_poincare_check(&Subcomplex::plaquettes(complex, i, &open)?, field).2
            && euler_poincare_check(&Subcomplex::plaquettes(complex, d - i, &dual)?, field).2;
        if !(r.eq1 && r.eq2 && r.eq3 && r.offset == c && euler) {
            bad += 1;
        }
    }
    Ok(bad)
}

fn alexander(n: usize, out: &mut Vec<Check>) -> Result<(), CliError> {
    let cases = [(build_torus(2, 4, 2)?, 1, "T2_4 i=1"), (build_torus(4, 2, 4)?, 2, "T4_2 i=2")];
    for (k, (t, i, label)) in cases.iter().enumerate() {
        for q in [2u64, 3] {
            let mut rng = chain_rng(SUITE_SEED, (10 * k) as u64 + q);
            let bad = alexander_failures(t, *i, f(q), n, &mut rng)?;
            out.push(Check::at_most("alexander", format!("{label} q={q} failing configs of {n}"), bad as f64, 0.0));
        }
    }
    Ok(())
}

/// The vertex 0-cycle `v_last - v_0` of a grid.
fn corner_cycle(g: &Complex, field: PrimeField) -> Chain {
    let last = g.num_cells(0) - 1;
    Chain::from_signed(0, field, &[(last, 1), (0, -1)])
}

fn coupling(out: &mut Vec<Check>) -> Result<(), CliError> {
    let square = build_grid(&[1, 1], 2, Boundary::Free)?;
    let box2 = build_grid(&[2, 2], 2, Boundary::Free)?;
    for (g, label) in [(&square, "square"), (&box2, "2x2 box")] {
        for q in [2u64, 3] {
            let field = f(q);
            for beta in [0.5, 1.0] {
                let p = bond_probability(beta);
                let c = exact_coupling(g, 1, field, p)?;
                let gibbs = exact_gibbs(g, 1, field, beta)?;
                let rcm = exact_distribution(g, &RcmParams::new(p, q as f64, 1)?.with_field(field))?;
                let mut bonds = vec![0.0; rcm.probs.len()];
                for (mask, &w) in c.bonds.iter().enumerate() {
                    let open: Vec<bool> = (0..g.num_cells(1)).map(|k| mask >> k & 1 == 1).collect();
                    bonds[rcm.stats.index_of(&open).expect("free")] += w;
                }
                let name = format!("{label} i=1 q={q} beta={beta}");
                out.push(Check::at_most("coupling", format!("{name} spin marginal tv"), total_variation(&c.spins, &gibbs.probs), 1e-12));
                out.push(Check::at_most("coupling", format!("{name} bond marginal tv"), total_variation(&bonds, &rcm.probs), 1e-12));
            }
        }
    }
    let cases: [(&Complex, usize, &str); 3] = [(&square, 1, "square i=1"), (&square, 2, "square i=2"), (&box2, 1, "2x2 box i=1")];
    for (g, i, label) in cases {
        for q in [2u64, 3] {
            let field = f(q);
            let gamma = if i == 1 { corner_cycle(g, field) } else { Chain::new(2, field, vec![(0, 1)]).boundary(g) };
            for beta in [0.5, 1.0] {
                let r = wilson_identity(g, i, field, beta, &gamma)?;
                let name = format!("{label} q={q} beta={beta}");
                let w = (r.wilson.0 - r.mu_v).abs().max(r.wilson.1.abs());
                out.push(Check::at_most("coupling", format!("{name} E[W] = mu(V)"), w, 1e-12));
                let tau = (r.two_point - (1.0 - 1.0 / q as f64) * r.mu_v).abs();
                out.push(Check::at_most("coupling", format!("{name} two-point = (1-1/q) mu(V)"), tau, 1e-12));
                let law = r
                    .law_given_not_v
                    .map(|l| l.iter().map(|x| (x - 1.0 / q as f64).abs()).fold(0.0, f64::max))
                    .unwrap_or(0.0);
                out.push(Check::at_most("coupling", format!("{name} W uniform given not V"), law, 1e-12));
            }
        }
    }
    Ok(())
}

fn stationarity(out: &mut Vec<Check>) -> Result<(), CliError> {
    let square = build_grid(&[1, 1], 2, Boundary::Free)?;
    for q in [2u64, 3] {
        for (i, beta) in [(1, 1.0), (1, 0.3), (2, 1.0)] {
            let (table, k) = sw_transition_kernel(&square, i, f(q), beta)?;
            let name = format!("square i={i} q={q} beta={beta}");
            out.push(Check::at_most("sw-stationarity", format!("{name} stationarity"), k.stationarity_residual(&table.probs), 1e-10));
            out.push(Check::at_most("sw-stationarity", format!("{name} detailed balance"), k.detailed_balance_residual(&table.probs), 1e-10));
            let (table, k) = heat_bath_sweep_kernel(&square, i, f(q), beta)?;
            out.push(Check::at_most("sw-stationarity", format!("{name} heat-bath stationarity"), k.stationarity_residual(&table.probs), 1e-10));
        }
    }
    Ok(())
}

/// Random face-closed subcomplex: each top cell kept with a random density,
/// plus scattered lower cells, then closed under faces.
pub fn random_subcomplex(complex: &Complex, rng: &mut ChainRng) -> Vec<Vec<bool>> {
    let top = complex.max_dim();
    let u = uniform(rng);
    let mut masks: Vec<Vec<bool>> = (0..=top).map(|k| (0..complex.num_cells(k)).map(|_| uniform(rng) < u).collect()).collect();
    for k in (1..=top).rev() {
        for id in 0..complex.num_cells(k) {
            if masks[k][id] {
                for &(face, _) in complex.faces(k, id) {
                    masks[k - 1][face as usize] = true;
                }
            }
        }
    }
    masks
}

/// Betti numbers from dense boundary matrices built directly from the face lists.
pub fn dense_betti(complex: &Complex, masks: &[Vec<bool>], field: PrimeField) -> Vec<usize> {
    let cells: Vec<Vec<usize>> = masks.iter().map(|m| (0..m.len()).filter(|&c| m[c]).collect()).collect();
    let rank = |k: usize| -> usize {
        if k == 0 || k >= masks.len() || cells[k].is_empty() || cells[k - 1].is_empty() {
            return 0;
        }
        let row_of: std::collections::HashMap<usize, usize> = cells[k - 1].iter().enumerate().map(|(r, &c)| (c, r)).collect();
        let mut m = vec![vec![0u32; cells[k].len()]; cells[k - 1].len()];
        for (col, &c) in cells[k].iter().enumerate() {
            for &(face, s) in complex.faces(k, c) {
                let r = row_of[&(face as usize)];
                m[r][col] = field.add(m[r][col], field.from_i64(s as i64));
            }
        }
        dense::rank(&m, field)
    };
    (0..masks.len()).map(|k| cells[k].len() - rank(k) - rank(k + 1)).collect()
}

fn homology(n: usize, out: &mut Vec<Check>) -> Result<(), CliError> {
    let klein = ChainComplex::new(vec![1, 2, 1], vec![vec![vec![0, 0]], vec![vec![2], vec![0]]])?;
    let b2 = [(2u64, 1usize), (3, 0)];
    for (q, expected) in b2 {
        let got = klein.betti(2, f(q));
        out.push(Check::at_most("homology", format!("Klein bottle b2 over F_{q} = {expected}"), got.abs_diff(expected) as f64, 0.0));
    }
    let ambient = [
        build_grid(&[3, 3], 2, Boundary::Free)?,
        build_grid(&[2, 2, 2], 3, Boundary::Free)?,
        build_torus(2, 3, 2)?,
        build_torus(3, 2, 3)?,
    ];
    let mut rng = chain_rng(SUITE_SEED, 100);
    let mut bad = 0;
    for _ in 0..n {
        let g = &ambient[below(&mut rng, ambient.len() as u32) as usize];
        let q = [2u64, 3, 5][below(&mut rng, 3) as usize];
        let masks = random_subcomplex(g, &mut rng);
        let oracle = dense_betti(g, &masks, f(q));
        let sub = Subcomplex::from_masks(g, masks)?;
        let fast: Vec<usize> = (0..=g.max_dim()).map(|k| betti(&sub, k, f(q))).collect();
        if fast != oracle {
            bad += 1;
        }
    }
    out.push(Check::at_most("homology", format!("random complexes disagreeing with dense elimination, of {n}"), bad as f64, 0.0));
    Ok(())
}

fn fkg(out: &mut Vec<Check>) -> Result<(), CliError> {
    let t = build_torus(2, 2, 2)?;
    for q in [1.0, 2.0, 3.0] {
        for p in [0.3, 0.6] {
            let field = if q == 1.0 { f(2) } else { f(q as u64) };
            let r = fkg_probe(&t, &RcmParams::new(p, q, 1)?.with_field(field), 200, SUITE_SEED)?;
            let name = format!("T2_2 i=1 q={q} p={p}");
            out.push(Check::at_most("fkg", format!("{name} lattice condition"), (-r.min_lattice_slack).max(0.0), 1e-12));
            out.push(Check { group: "fkg", name: format!("{name} betti supermodular"), value: r.betti_supermodular as u8 as f64, tolerance: 1.0, passed: r.betti_supermodular });
            out.push(Check::at_most("fkg", format!("{name} positive association"), (-r.min_association).max(0.0), 1e-14));
        }
    }
    let r = q_monotonicity_probe(&t, 1, f(2), &[0.2, 0.5, 0.8], &[1.0, 1.5, 2.0, 3.0, 4.0])?;
    out.push(Check { group: "fkg", name: "E[eta] non-increasing in q at fixed p".into(), value: r.decreasing_at_fixed_p as u8 as f64, tolerance: 1.0, passed: r.decreasing_at_fixed_p });
    out.push(Check { group: "fkg", name: "E[eta] non-decreasing in q at fixed p_hat".into(), value: r.increasing_at_fixed_p_hat as u8 as f64, tolerance: 1.0, passed: r.increasing_at_fixed_p_hat });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fault_injection_breaks_duality() {
        let suite = Suite { groups: vec!["duality", "partition"], fault: Fault::Weight, ..Suite::default() };
        let checks = run(&suite).unwrap();
        // At q = 1 both partition functions are 1 whatever the dual p, so only the q > 1 ratios must break.
        assert!(checks.iter().filter(|c| c.group == "duality" || !c.name.contains("q=1 ")).all(|c| !c.passed), "{checks:?}");
        let clean = run(&Suite { groups: vec!["duality", "partition"], ..Suite::default() }).unwrap();
        assert!(clean.iter().all(|c| c.passed), "{clean:?}");
    }

    #[test]
    fn dense_oracle_on_the_torus() {
        let t = build_torus(2, 3, 2).unwrap();
        let masks: Vec<Vec<bool>> = (0..=2).map(|k| vec![true; t.num_cells(k)]).collect();
        assert_eq!(dense_betti(&t, &masks, f(3)), vec![1, 2, 1]);
    }
}
