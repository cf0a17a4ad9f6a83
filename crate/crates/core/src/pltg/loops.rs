//! Rectangular loops and Monte Carlo Wilson-loop estimates.

use alloc::vec;
use alloc::vec::Vec;

use super::{root_of_unity, wilson_phase, SpinHeatBath, SwendsenWang};
use crate::cubical::{CellId, Chain, Complex};
use crate::field::PrimeField;
use crate::rcm::{ChainSettings, CycleTarget};
use crate::rng::ChainRng;
use crate::stats::{batch_means, Estimate};
use crate::{Error, Result};

/// Boundary of an axis-aligned i-dimensional box `corner + [0, dims]` spanned
/// by `axes`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopSpec {
    pub corner: Vec<i64>,
    pub axes: Vec<usize>,
    pub dims: Vec<usize>,
}

impl LoopSpec {
    pub fn new(corner: Vec<i64>, axes: Vec<usize>, dims: Vec<usize>) -> Result<Self> {
        if axes.is_empty() || axes.len() != dims.len() || axes.iter().any(|&a| a >= corner.len()) {
            return Err(Error::InvalidParameter("loop axes and dims must match"));
        }
        if axes.windows(2).any(|w| w[0] >= w[1]) || dims.iter().any(|&n| n == 0) {
            return Err(Error::InvalidParameter("loop axes must increase and dims be positive"));
        }
        Ok(LoopSpec { corner, axes, dims })
    }

    /// `n × ... × n` loop in the first `i` axes, centered at the origin.
    pub fn centered_square(d: usize, i: usize, n: usize) -> Result<Self> {
        if i == 0 || i > d {
            return Err(Error::InvalidParameter("need 0 < i <= d"));
        }
        let mut corner = vec![0i64; d];
        for c in corner.iter_mut().take(i) {
            *c = -((n / 2) as i64);
        }
        LoopSpec::new(corner, (0..i).collect(), vec![n; i])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn area(&self) -> usize {
        self.dims.iter().product()
    }

    /// Smallest distance from the filling to the boundary of a box complex.
    pub fn margin(&self, complex: &Complex) -> Option<i64> {
        if complex.is_torus() {
            return None;
        }
        let mut m = i64::MAX;
        for a in 0..complex.d() {
            let lo = complex.lower()[a];
            let hi = lo + complex.extent()[a] as i64;
            let span = self.axes.iter().position(|&x| x == a).map_or(0, |k| self.dims[k] as i64);
            m = m.min(self.corner[a] - lo).min(hi - self.corner[a] - span);
        }
        Some(m)
    }

    /// The i-chain of unit cells filling the box, all with coefficient 1.
    pub fn filling(&self, complex: &Complex, field: PrimeField) -> Result<Chain> {
        if self.corner.len() != complex.d() {
            return Err(Error::DimensionMismatch { expected: complex.d(), found: self.corner.len() });
        }
        let mut terms = Vec::with_capacity(self.area());
        let mut offset = vec![0usize; self.dim()];
        loop {
            let mut base = self.corner.clone();
            for (k, &a) in self.axes.iter().enumerate() {
                base[a] += offset[k] as i64;
            }
            terms.push((complex.id(&CellId::new(base, self.axes.clone())?)?, 1));
            let mut k = 0;
            while k < offset.len() {
                offset[k] += 1;
                if offset[k] < self.dims[k] {
                    break;
                }
                offset[k] = 0;
                k += 1;
            }
            if k == offset.len() {
                break;
            }
        }
        terms.sort_unstable_by_key(|e| e.0);
        Ok(Chain::new(self.dim(), field, terms))
    }

    pub fn boundary(&self, complex: &Complex, field: PrimeField) -> Result<Chain> {
        Ok(self.filling(complex, field)?.boundary(complex))
    }

    /// Number of (i-1)-cells in the loop.
    pub fn perimeter(&self, complex: &Complex, field: PrimeField) -> Result<usize> {
        Ok(self.boundary(complex, field)?.terms().len())
    }

    pub fn target(&self, complex: &Complex, field: PrimeField) -> Result<CycleTarget> {
        Ok(CycleTarget::from_filling(complex, self.filling(complex, field)?))
    }
}

/// Monte Carlo estimate of `E_ν[W_γ]` with the real part's standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WilsonSample {
    pub re: Estimate,
    pub im: Estimate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinSampler {
    SwendsenWang,
    HeatBath,
}

impl SpinSampler {
    pub fn name(self) -> &'static str {
        match self {
            SpinSampler::SwendsenWang => "swendsen-wang",
            SpinSampler::HeatBath => "heat-bath",
        }
    }
}

enum SpinChain<'a> {
    Sw(SwendsenWang<'a>),
    Hb(SpinHeatBath<'a>),
}

impl SpinChain<'_> {
    fn step(&mut self) {
        match self {
            SpinChain::Sw(c) => c.step(),
            SpinChain::Hb(c) => c.sweep(),
        }
    }

    fn spins(&self) -> &[u32] {
        match self {
            SpinChain::Sw(c) => c.spins(),
            SpinChain::Hb(c) => c.spins(),
        }
    }
}

/// Estimates `E_ν[W_γ]` for each loop from one chain.
#[allow(clippy::too_many_arguments)]
pub fn wilson_expectation(
    complex: &Complex,
    i: usize,
    field: PrimeField,
    beta: f64,
    loops: &[Chain],
    settings: &ChainSettings,
    sampler: SpinSampler,
    rng: ChainRng,
) -> Result<Vec<WilsonSample>> {
    for g in loops {
        if !g.boundary(complex).is_zero() {
            return Err(Error::NotACycle);
        }
    }
    let p = super::bond_probability(beta);
    let mut sw = match sampler {
        SpinSampler::SwendsenWang => {
            SpinChain::Sw(SwendsenWang::new(complex, i, field, p, vec![false; complex.num_cells(i)], rng)?)
        }
        SpinSampler::HeatBath => SpinChain::Hb(SpinHeatBath::new(complex, i, field, beta, rng)?),
    };
    for _ in 0..settings.burn_in {
        sw.step();
    }
    let q = field.modulus();
    let mut re = vec![Vec::with_capacity(settings.n_samples); loops.len()];
    let mut im = vec![Vec::with_capacity(settings.n_samples); loops.len()];
    for _ in 0..settings.n_samples {
        for _ in 0..settings.thinning.max(1) {
            sw.step();
        }
        for (k, g) in loops.iter().enumerate() {
            let (c, s) = root_of_unity(wilson_phase(g, sw.spins()), q);
            re[k].push(c);
            im[k].push(s);
        }
    }
    Ok((0..loops.len())
        .map(|k| WilsonSample {
            re: batch_means(&re[k], settings.n_batches),
            im: batch_means(&im[k], settings.n_batches),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubical::{build_box, build_torus, Boundary};
    use crate::homology::{is_null_homologous, Subcomplex};
    use crate::pltg::{couple_cocycle, cocycle_basis};
    use crate::rng::{chain_rng, uniform};

    #[test]
    fn square_loop_geometry() {
        let b = build_box(3, 4, 2, Boundary::Free).unwrap();
        let f2 = PrimeField::new(2).unwrap();
        for n in 1..=3 {
            let l = LoopSpec::centered_square(3, 2, n).unwrap();
            assert_eq!(l.area(), n * n);
            assert_eq!(l.perimeter(&b, f2).unwrap(), 4 * n);
            assert!(l.boundary(&b, f2).unwrap().boundary(&b).is_zero());
        }
        assert_eq!(LoopSpec::centered_square(3, 2, 2).unwrap().margin(&b), Some(3));
    }

    #[test]
    fn wilson_depends_on_homology_class_only() {
        // Homologous loops in P agree on cocycles of P.
        let t = build_torus(2, 4, 2).unwrap();
        let f3 = PrimeField::new(3).unwrap();
        let mut rng = chain_rng(11, 0);
        let a = LoopSpec::new(vec![0, 0], vec![0, 1], vec![1, 1]).unwrap();
        let b = LoopSpec::new(vec![0, 0], vec![0, 1], vec![2, 1]).unwrap();
        let (ga, gb) = (a.boundary(&t, f3).unwrap(), b.boundary(&t, f3).unwrap());
        let mut checked = 0;
        for _ in 0..200 {
            let open: Vec<bool> = (0..t.num_cells(2)).map(|_| uniform(&mut rng) < 0.6).collect();
            let sub = Subcomplex::plaquettes(&t, 2, &open).unwrap();
            let diff = Chain::new(1, f3, crate::linalg::axpy(f3, gb.terms(), f3.neg(1), ga.terms()));
            let homologous = is_null_homologous(&diff, &sub, f3).unwrap();
            let basis = cocycle_basis(&t, 2, f3, &open);
            for _ in 0..5 {
                let f = couple_cocycle(&basis, t.num_cells(1), f3, &mut rng);
                if homologous {
                    assert_eq!(wilson_phase(&ga, &f), wilson_phase(&gb, &f));
                }
            }
            checked += homologous as usize;
        }
        assert!(checked > 0);
    }

    #[test]
    fn strong_coupling_wilson_is_near_one() {
        let b = build_box(2, 2, 2, Boundary::Free).unwrap();
        let f2 = PrimeField::new(2).unwrap();
        let g = LoopSpec::centered_square(2, 2, 2).unwrap().boundary(&b, f2).unwrap();
        let settings = ChainSettings { burn_in: 10, thinning: 1, n_samples: 200, n_batches: 10 };
        for sampler in [SpinSampler::SwendsenWang, SpinSampler::HeatBath] {
            let w = wilson_expectation(&b, 2, f2, 40.0, &[g.clone()], &settings, sampler, chain_rng(1, 0)).unwrap();
            assert!(w[0].re.mean > 0.999);
        }
    }
}
