//! Potts lattice gauge theory with `F_q` spins on (i-1)-cells, its coupling
//! with the plaquette random-cluster model, and Wilson loops.
//!
//! A plaquette `σ` is satisfied when `δf(σ) = 0` in `F_q`, and
//! `H(f) = -#{σ : δf(σ) = 0}`.

use alloc::vec;
use alloc::vec::Vec;

use crate::cubical::{Chain, Complex};
use crate::field::PrimeField;
use crate::math::{cos, exp, ln, log_sum_exp, sin};
use crate::{Error, Result};

pub mod heatbath;
pub mod loops;
pub mod scan;
pub mod sw;

pub use heatbath::SpinHeatBath;
pub use loops::{wilson_expectation, LoopSpec, SpinSampler, WilsonSample};
pub use scan::{area_perimeter_scan, Coupling, ScanRow, ScanSettings};
pub use sw::{cocycle_basis, couple_cocycle, couple_sample, sw_transition_kernel, SwendsenWang};

/// Largest number of spin states accepted by exact enumeration.
pub const SPIN_STATE_LIMIT: usize = 1 << 20;

/// Bond probability `1 - e^{-β}`.
pub fn bond_probability(beta: f64) -> f64 {
    1.0 - exp(-beta)
}

/// Inverse of [`bond_probability`]; `p = 1` gives infinity.
pub fn beta_from_p(p: f64) -> f64 {
    -ln(1.0 - p)
}

fn check_dims(complex: &Complex, i: usize) -> Result<()> {
    if i == 0 || i > complex.max_dim() {
        return Err(Error::InvalidParameter("need 0 < i <= max_dim"));
    }
    Ok(())
}

/// `δf(σ)` for an i-cell `σ` and an (i-1)-cochain `f`.
#[inline]
pub fn coboundary_value(complex: &Complex, i: usize, field: PrimeField, f: &[u32], sigma: usize) -> u32 {
    let mut acc = 0u32;
    for &(t, s) in complex.faces(i, sigma) {
        let v = f[t as usize];
        acc = if s > 0 { field.add(acc, v) } else { field.sub(acc, v) };
    }
    acc
}

/// Satisfied-plaquette mask of `f`.
pub fn satisfied(complex: &Complex, i: usize, field: PrimeField, f: &[u32]) -> Vec<bool> {
    (0..complex.num_cells(i)).map(|s| coboundary_value(complex, i, field, f, s) == 0).collect()
}

pub fn hamiltonian(complex: &Complex, i: usize, field: PrimeField, f: &[u32]) -> Result<i64> {
    check_dims(complex, i)?;
    if f.len() != complex.num_cells(i - 1) {
        return Err(Error::DimensionMismatch { expected: complex.num_cells(i - 1), found: f.len() });
    }
    Ok(-(satisfied(complex, i, field, f).iter().filter(|&&b| b).count() as i64))
}

/// `f + δg` for an (i-2)-cochain `g`.
pub fn gauge_transform(complex: &Complex, i: usize, field: PrimeField, f: &[u32], g: &[u32]) -> Vec<u32> {
    (0..f.len()).map(|t| field.add(f[t], coboundary_value(complex, i - 1, field, g, t))).collect()
}

/// Decodes a spin-state index (base-`q` digits, cell 0 least significant).
pub fn decode_state(mut index: usize, n: usize, q: u32) -> Vec<u32> {
    let mut f = vec![0u32; n];
    for v in f.iter_mut() {
        *v = (index % q as usize) as u32;
        index /= q as usize;
    }
    f
}

pub fn encode_state(f: &[u32], q: u32) -> usize {
    f.iter().rev().fold(0usize, |acc, &v| acc * q as usize + v as usize)
}

pub(crate) fn state_count(n: usize, q: u32) -> Result<usize> {
    let mut total = 1usize;
    for _ in 0..n {
        total = total.saturating_mul(q as usize);
        if total > SPIN_STATE_LIMIT {
            return Err(Error::TooLarge { cells: n, limit: SPIN_STATE_LIMIT });
        }
    }
    Ok(total)
}

/// Exact Gibbs measure `ν(f) ∝ e^{-βH(f)}` over all (i-1)-cochains.
#[derive(Clone, Debug)]
pub struct GibbsTable {
    pub field: PrimeField,
    pub n_spins: usize,
    pub probs: Vec<f64>,
    pub log_z: f64,
    /// Satisfied count of each state.
    pub satisfied: Vec<u32>,
}

impl GibbsTable {
    pub fn state(&self, index: usize) -> Vec<u32> {
        decode_state(index, self.n_spins, self.field.modulus())
    }

    pub fn expect(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.probs.iter().enumerate().map(|(k, &p)| p * f(k)).sum()
    }

    pub fn prob_satisfied(&self, complex: &Complex, i: usize, sigma: usize) -> f64 {
        self.expect(|k| (coboundary_value(complex, i, self.field, &self.state(k), sigma) == 0) as u8 as f64)
    }
}

pub fn exact_gibbs(complex: &Complex, i: usize, field: PrimeField, beta: f64) -> Result<GibbsTable> {
    check_dims(complex, i)?;
    let n = complex.num_cells(i - 1);
    let total = state_count(n, field.modulus())?;
    let mut sat = Vec::with_capacity(total);
    let mut lw = Vec::with_capacity(total);
    for k in 0..total {
        let f = decode_state(k, n, field.modulus());
        let s = satisfied(complex, i, field, &f).iter().filter(|&&b| b).count();
        sat.push(s as u32);
        lw.push(beta * s as f64);
    }
    let log_z = log_sum_exp(&lw);
    let probs = lw.iter().map(|w| exp(w - log_z)).collect();
    Ok(GibbsTable { field, n_spins: n, probs, log_z, satisfied: sat })
}

/// Both marginals of the coupling
/// `κ(f, ω) ∝ ∏_σ [(1-p) 1{ω_σ = 0} + p 1{ω_σ = 1} 1{δf(σ) = 0}]`,
/// obtained by summing the joint weight over all pairs with `ω ⊆ sat(f)`.
#[derive(Clone, Debug)]
pub struct CouplingMarginals {
    /// Indexed by spin state.
    pub spins: Vec<f64>,
    /// Indexed by plaquette bitmask.
    pub bonds: Vec<f64>,
    pub log_z: f64,
}

/// Largest plaquette count accepted by [`exact_coupling`].
pub const COUPLING_PLAQUETTE_LIMIT: usize = 20;

pub fn exact_coupling(complex: &Complex, i: usize, field: PrimeField, p: f64) -> Result<CouplingMarginals> {
    check_dims(complex, i)?;
    let n = complex.num_cells(i - 1);
    let m = complex.num_cells(i);
    if m > COUPLING_PLAQUETTE_LIMIT {
        return Err(Error::TooLarge { cells: m, limit: COUPLING_PLAQUETTE_LIMIT });
    }
    let total = state_count(n, field.modulus())?;
    // Weight of ω as a product over all m plaquettes.
    let lp = ln(p);
    let lq = ln(1.0 - p);
    let log_w = |mask: usize| {
        let k = mask.count_ones() as f64;
        let mut w = 0.0;
        if k > 0.0 {
            w += k * lp;
        }
        if (m as f64 - k) > 0.0 {
            w += (m as f64 - k) * lq;
        }
        w
    };
    let mut spins = vec![0.0; total];
    let mut bonds = vec![0.0; 1 << m];
    let mut sat_of = Vec::with_capacity(total);
    let mut max_lw = f64::NEG_INFINITY;
    for s in 0..total {
        let f = decode_state(s, n, field.modulus());
        let sat = satisfied(complex, i, field, &f);
        let mask: usize = sat.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| 1 << k).sum();
        sat_of.push(mask);
        max_lw = max_lw.max(log_w(0)).max(log_w(mask));
    }
    for (s, &sat) in sat_of.iter().enumerate() {
        // Every ω ⊆ sat, including the empty set.
        let mut sub = sat;
        loop {
            let w = exp(log_w(sub) - max_lw);
            spins[s] += w;
            bonds[sub] += w;
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & sat;
        }
    }
    let z: f64 = spins.iter().sum();
    spins.iter_mut().for_each(|x| *x /= z);
    bonds.iter_mut().for_each(|x| *x /= z);
    Ok(CouplingMarginals { spins, bonds, log_z: ln(z) + max_lw })
}

/// `f(γ) = Σ γ_τ f(τ)` in `F_q`.
pub fn wilson_phase(gamma: &Chain, f: &[u32]) -> u32 {
    let field = gamma.field();
    gamma.terms().iter().fold(0, |acc, &(t, c)| field.add(acc, field.mul(c, f[t])))
}

/// `e^{2πi k/q}` as `(re, im)`.
pub fn root_of_unity(k: u32, q: u32) -> (f64, f64) {
    let theta = 2.0 * core::f64::consts::PI * k as f64 / q as f64;
    (cos(theta), sin(theta))
}

/// Wilson loop value as an `F_q` element and as a unit complex number.
pub fn wilson_loop(complex: &Complex, gamma: &Chain, f: &[u32]) -> Result<(u32, (f64, f64))> {
    if !gamma.boundary(complex).is_zero() {
        return Err(Error::NotACycle);
    }
    let k = wilson_phase(gamma, f);
    Ok((k, root_of_unity(k, gamma.field().modulus())))
}

/// Exact `E_ν[W_γ]` from a Gibbs table.
pub fn exact_wilson(table: &GibbsTable, gamma: &Chain) -> (f64, f64) {
    let q = table.field.modulus();
    let mut re = 0.0;
    let mut im = 0.0;
    for (k, &p) in table.probs.iter().enumerate() {
        let (c, s) = root_of_unity(wilson_phase(gamma, &table.state(k)), q);
        re += p * c;
        im += p * s;
    }
    (re, im)
}

/// Exact law of `f(γ)` under `ν`, indexed by `F_q` element.
pub fn exact_wilson_law(table: &GibbsTable, gamma: &Chain) -> Vec<f64> {
    let mut law = vec![0.0; table.field.modulus() as usize];
    for (k, &p) in table.probs.iter().enumerate() {
        law[wilson_phase(gamma, &table.state(k)) as usize] += p;
    }
    law
}

/// Two-point function `ν(W_γ = 1) - 1/q`.
pub fn exact_two_point(table: &GibbsTable, gamma: &Chain) -> f64 {
    exact_wilson_law(table, gamma)[0] - 1.0 / table.field.modulus() as f64
}

/// Exact quantities linking Wilson loops to the plaquette model, all from one
/// enumeration of the coupling.
#[derive(Clone, Debug, PartialEq)]
pub struct WilsonIdentity {
    /// `E_ν[W_γ]` under the gauge measure.
    pub wilson: (f64, f64),
    /// `ν(W_γ = 1) - 1/q`.
    pub two_point: f64,
    /// `μ(V_γ)` from the bond marginal of the coupling.
    pub mu_v: f64,
    /// Law of `f(γ)` under the coupling conditioned on `V_γ^c`; `None` when `μ(V_γ) = 1`.
    pub law_given_not_v: Option<Vec<f64>>,
}

pub fn wilson_identity(complex: &Complex, i: usize, field: PrimeField, beta: f64, gamma: &Chain) -> Result<WilsonIdentity> {
    check_dims(complex, i)?;
    if gamma.dim() != i - 1 {
        return Err(Error::DimensionMismatch { expected: i - 1, found: gamma.dim() });
    }
    if !gamma.boundary(complex).is_zero() {
        return Err(Error::NotACycle);
    }
    let table = exact_gibbs(complex, i, field, beta)?;
    let m = complex.num_cells(i);
    if m > COUPLING_PLAQUETTE_LIMIT {
        return Err(Error::TooLarge { cells: m, limit: COUPLING_PLAQUETTE_LIMIT });
    }
    let coupling = exact_coupling(complex, i, field, bond_probability(beta))?;
    let mut in_v = vec![false; 1 << m];
    for (mask, v) in in_v.iter_mut().enumerate() {
        let open: Vec<bool> = (0..m).map(|k| mask >> k & 1 == 1).collect();
        let sub = crate::homology::Subcomplex::plaquettes(complex, i, &open)?;
        *v = crate::homology::is_null_homologous(gamma, &sub, field)?;
    }
    let mu_v: f64 = coupling.bonds.iter().zip(&in_v).filter(|(_, &v)| v).map(|(w, _)| w).sum();
    // Joint law of (f(γ), V_γ^c): redo the subset sum keeping both coordinates.
    let q = field.modulus();
    let n = table.n_spins;
    let p = bond_probability(beta);
    let mut law = vec![0.0; q as usize];
    let mut total = 0.0;
    for s in 0..table.probs.len() {
        let f = decode_state(s, n, q);
        let sat = satisfied(complex, i, field, &f);
        let sat_mask: usize = sat.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| 1 << k).sum();
        let a = wilson_phase(gamma, &f) as usize;
        let mut sub = sat_mask;
        loop {
            let k = sub.count_ones() as i32;
            let w = crate::math::powf(p, k as f64) * crate::math::powf(1.0 - p, (m as i32 - k) as f64);
            total += w;
            if !in_v[sub] {
                law[a] += w;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & sat_mask;
        }
    }
    let not_v: f64 = law.iter().sum();
    let law_given_not_v = (not_v > 1e-300 * total).then(|| law.iter().map(|x| x / not_v).collect());
    Ok(WilsonIdentity { wilson: exact_wilson(&table, gamma), two_point: exact_two_point(&table, gamma), mu_v, law_given_not_v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubical::{build_grid, build_torus, Boundary};
    use crate::rng::{below, chain_rng};

    fn f2() -> PrimeField {
        PrimeField::new(2).unwrap()
    }

    #[test]
    fn hamiltonian_examples() {
        let g = build_grid(&[1, 1], 2, Boundary::Free).unwrap();
        assert_eq!(hamiltonian(&g, 2, f2(), &[0; 4]).unwrap(), -1);
        assert_eq!(hamiltonian(&g, 2, f2(), &[1, 0, 0, 0]).unwrap(), 0);
        assert!(hamiltonian(&g, 2, f2(), &[0; 3]).is_err());
        let t = build_torus(2, 3, 2).unwrap();
        assert_eq!(hamiltonian(&t, 2, f2(), &vec![0; t.num_cells(1)]).unwrap(), -9);
    }

    #[test]
    fn gibbs_single_square() {
        let g = build_grid(&[1, 1], 2, Boundary::Free).unwrap();
        let t = exact_gibbs(&g, 2, f2(), 1.0).unwrap();
        assert_eq!(t.probs.len(), 16);
        let e = core::f64::consts::E;
        assert!((t.prob_satisfied(&g, 2, 0) - e / (e + 1.0)).abs() < 1e-14);
        let t0 = exact_gibbs(&g, 2, f2(), 0.0).unwrap();
        assert!(t0.probs.iter().all(|&p| (p - 1.0 / 16.0).abs() < 1e-15));
    }

    #[test]
    fn gauge_invariance() {
        let t = build_torus(3, 3, 3).unwrap();
        let f3 = PrimeField::new(3).unwrap();
        let mut rng = chain_rng(1, 0);
        for i in 1..=3 {
            for _ in 0..20 {
                let f: Vec<u32> = (0..t.num_cells(i - 1)).map(|_| below(&mut rng, 3)).collect();
                if i == 1 {
                    assert!(hamiltonian(&t, i, f3, &f).is_ok());
                    continue;
                }
                let g: Vec<u32> = (0..t.num_cells(i - 2)).map(|_| below(&mut rng, 3)).collect();
                let h = gauge_transform(&t, i, f3, &f, &g);
                assert_eq!(hamiltonian(&t, i, f3, &f).unwrap(), hamiltonian(&t, i, f3, &h).unwrap());
            }
        }
    }

    #[test]
    fn state_encoding_roundtrip() {
        for k in 0..81 {
            assert_eq!(encode_state(&decode_state(k, 4, 3), 3), k);
        }
    }

    #[test]
    fn coupling_spin_marginal_matches_gibbs() {
        let g = build_grid(&[1, 1], 2, Boundary::Free).unwrap();
        for q in [2u64, 3] {
            let f = PrimeField::new(q).unwrap();
            for beta in [0.5, 1.0] {
                let c = exact_coupling(&g, 1, f, bond_probability(beta)).unwrap();
                let t = exact_gibbs(&g, 1, f, beta).unwrap();
                assert!(crate::stats::total_variation(&c.spins, &t.probs) < 1e-12);
            }
        }
    }

    #[test]
    fn wilson_expectation_equals_bounding_probability() {
        let g = build_grid(&[1, 1], 2, Boundary::Free).unwrap();
        for q in [2u64, 3] {
            let f = PrimeField::new(q).unwrap();
            let sq = Chain::new(2, f, vec![(0, 1)]).boundary(&g);
            let r = wilson_identity(&g, 2, f, 0.8, &sq).unwrap();
            // The only surface is the square itself, open with probability p̂.
            let p = bond_probability(0.8);
            let p_hat = (p / q as f64) / (1.0 - p + p / q as f64);
            assert!((r.mu_v - p_hat).abs() < 1e-12);
            assert!((r.wilson.0 - r.mu_v).abs() < 1e-12 && r.wilson.1.abs() < 1e-12);
            assert!((r.two_point - (1.0 - 1.0 / q as f64) * r.mu_v).abs() < 1e-12);
            for x in r.law_given_not_v.unwrap() {
                assert!((x - 1.0 / q as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn wilson_rejects_non_cycles() {
        let g = build_grid(&[1, 1], 2, Boundary::Free).unwrap();
        let gamma = Chain::new(1, f2(), vec![(0, 1)]);
        assert_eq!(wilson_loop(&g, &gamma, &[0; 4]), Err(Error::NotACycle));
        let sq = Chain::new(2, f2(), vec![(0, 1)]).boundary(&g);
        assert_eq!(wilson_loop(&g, &sq, &[0; 4]).unwrap(), (0, (1.0, 0.0)));
    }
}
