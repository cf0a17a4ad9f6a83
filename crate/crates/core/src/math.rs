//! Float helpers that work without `std`.

pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

/// `x * ln(y)` with the convention `0 * ln(0) = 0`.
pub fn xlny(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * ln(y)
    }
}

/// `ln(sum(exp(v)))`, stable; `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let s: f64 = values.iter().map(|v| exp(v - m)).sum();
    m + ln(s)
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r = 1usize;
    for j in 0..k {
        r = r * (n - j) / (j + 1);
    }
    r
}

pub fn logit(p: f64) -> f64 {
    ln(p / (1.0 - p))
}

pub fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + exp(-x))
}
