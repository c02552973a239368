//! Closed-form machinery for Gaussian data: power-law covariances, OU
//! marginals and scores, Gaussian KL, the discretization error terms of the
//! step-count bound, and an exact covariance propagation of the discretized
//! reverse chain that serves as the independent oracle for those bounds.

use crate::error::{Error, Result};
use crate::linalg::{asymmetry, sym_eigen};
use crate::tensor::Tensor;
use nalgebra::{DMatrix, DVector};

const SYMMETRY_TOL: f64 = 1e-12;
const EIG_FLOOR: f64 = -1e-12;

/// A Gaussian N(mean, cov) with its eigendecomposition cached at
/// construction. Eigenvalues in [-1e-12, 0) are clamped to zero; anything
/// lower is rejected.
#[derive(Debug, Clone)]
pub struct GaussianSpec {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    eigvals: DVector<f64>,
    eigvecs: DMatrix<f64>,
}

impl GaussianSpec {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        if cov.nrows() != cov.ncols() || cov.nrows() != mean.len() {
            return Err(Error::shape(
                "GaussianSpec::new",
                format!("square cov matching mean dim {}", mean.len()),
                format!("{}x{}", cov.nrows(), cov.ncols()),
            ));
        }
        let dev = asymmetry(&cov);
        if dev > SYMMETRY_TOL {
            return Err(Error::invalid(
                "GaussianSpec::new",
                format!("covariance asymmetry {dev:.3e} exceeds {SYMMETRY_TOL:.0e}"),
            ));
        }
        let (mut vals, vecs) = sym_eigen(&cov);
        for v in vals.iter_mut() {
            if *v < EIG_FLOOR {
                return Err(Error::invalid(
                    "GaussianSpec::new",
                    format!("covariance has eigenvalue {v:.3e} below the PSD floor"),
                ));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(GaussianSpec {
            mean,
            cov,
            eigvals: vals,
            eigvecs: vecs,
        })
    }

    /// Builds from an explicit eigensystem; cov is reassembled as Q diag Q^T.
    pub fn from_eigen(mean: DVector<f64>, eigvals: DVector<f64>, eigvecs: DMatrix<f64>) -> Self {
        let cov = &eigvecs * DMatrix::from_diagonal(&eigvals) * eigvecs.transpose();
        GaussianSpec {
            mean,
            cov,
            eigvals,
            eigvecs,
        }
    }

    pub fn standard(dim: usize) -> Self {
        GaussianSpec {
            mean: DVector::zeros(dim),
            cov: DMatrix::identity(dim, dim),
            eigvals: DVector::from_element(dim, 1.0),
            eigvecs: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn eigvals(&self) -> &DVector<f64> {
        &self.eigvals
    }

    pub fn eigvecs(&self) -> &DMatrix<f64> {
        &self.eigvecs
    }

    pub fn min_eig(&self) -> f64 {
        self.eigvals.min()
    }

    pub fn max_eig(&self) -> f64 {
        self.eigvals.max()
    }

    /// Draws one sample as mean + Q sqrt(diag) z.
    pub fn sample(&self, rng: &mut crate::rng::RngStream) -> DVector<f64> {
        let z = DVector::from_iterator(self.dim(), (0..self.dim()).map(|_| rng.normal()));
        let scaled = DVector::from_iterator(
            self.dim(),
            self.eigvals.iter().zip(z.iter()).map(|(&l, &zi)| l.max(0.0).sqrt() * zi),
        );
        &self.mean + &self.eigvecs * scaled
    }

    /// Log density; requires a nonsingular covariance.
    pub fn log_density(&self, x: &DVector<f64>) -> Result<f64> {
        if self.min_eig() <= 0.0 {
            return Err(Error::Singular("GaussianSpec::log_density".into()));
        }
        let d = self.dim() as f64;
        let y = self.eigvecs.transpose() * (x - &self.mean);
        let mut quad = 0.0;
        let mut ln_det = 0.0;
        for (yi, &l) in y.iter().zip(self.eigvals.iter()) {
            quad += yi * yi / l;
            ln_det += l.ln();
        }
        Ok(-0.5 * (quad + ln_det + d * (2.0 * std::f64::consts::PI).ln()))
    }
}

/// Condition number lambda_max / lambda_min of a covariance.
pub fn condition_number(spec: &GaussianSpec) -> Result<f64> {
    let min = spec.min_eig();
    if min <= 0.0 {
        return Err(Error::Singular("condition_number".into()));
    }
    Ok(spec.max_eig() / min)
}

/// A power-law spectrum S(w) = (lambda^eta + |w|^eta)^-1 on the 1D frequency
/// grid of a length-L circulant, w in {0, 1, ..., floor(L/2)} mirrored to
/// negative frequencies.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumSpec {
    pub side: usize,
    pub eta: f64,
    pub scale: f64,
}

impl SpectrumSpec {
    pub fn new(side: usize, eta: f64, scale: f64) -> Result<Self> {
        if side < 2 {
            return Err(Error::invalid("SpectrumSpec", "side must be >= 2"));
        }
        if eta <= 0.0 || scale <= 0.0 {
            return Err(Error::invalid("SpectrumSpec", "eta and scale must be positive"));
        }
        Ok(SpectrumSpec { side, eta, scale })
    }

    /// The paper-style defaults: eta = 1, lambda = 2*pi / L.
    pub fn natural_defaults(side: usize) -> Result<Self> {
        SpectrumSpec::new(side, 1.0, 2.0 * std::f64::consts::PI / side as f64)
    }
}

/// Raw (unnormalized) spectrum values per frequency index 0..L.
pub fn power_law_spectrum(spec: &SpectrumSpec) -> Vec<f64> {
    let l = spec.side;
    (0..l)
        .map(|k| {
            let w = k.min(l - k) as f64;
            1.0 / (spec.scale.powf(spec.eta) + w.powf(spec.eta))
        })
        .collect()
}

fn circulant_from_spectrum(spectrum: &[f64]) -> GaussianSpec {
    let d = spectrum.len();
    // Normalize so Tr(Sigma) = d; trace of a circulant equals sum of its
    // spectrum values.
    let total: f64 = spectrum.iter().sum();
    let scale = d as f64 / total;
    let s: Vec<f64> = spectrum.iter().map(|v| v * scale).collect();
    let mut first_row = vec![0.0; d];
    for (j, entry) in first_row.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (k, &sk) in s.iter().enumerate() {
            acc += sk * (2.0 * std::f64::consts::PI * k as f64 * j as f64 / d as f64).cos();
        }
        *entry = acc / d as f64;
    }
    let mut cov = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let off = (j + d - i) % d;
            cov[(i, j)] = first_row[off];
        }
    }
    // Exact symmetrization; the cosine sums are symmetric up to rounding.
    let sym = (&cov + cov.transpose()) * 0.5;
    GaussianSpec::new(DVector::zeros(d), sym).expect("circulant covariance is PSD")
}

/// Circulant covariance with the power-law spectrum, normalized to
/// Tr(Sigma) = d.
pub fn power_law_covariance(spec: &SpectrumSpec) -> GaussianSpec {
    circulant_from_spectrum(&power_law_spectrum(spec))
}

/// Same construction with the spectrum exponent-rescaled so the condition
/// number is exactly `kappa`: S'(w) = S(w)^gamma with gamma chosen so
/// max S' / min S' = kappa. Preserves the monotone spectral shape.
pub fn power_law_covariance_with_kappa(spec: &SpectrumSpec, kappa: f64) -> Result<GaussianSpec> {
    if kappa < 1.0 {
        return Err(Error::invalid("power_law_covariance_with_kappa", "kappa must be >= 1"));
    }
    let raw = power_law_spectrum(spec);
    let max = raw.iter().cloned().fold(f64::MIN, f64::max);
    let min = raw.iter().cloned().fold(f64::MAX, f64::min);
    let natural_kappa = max / min;
    let gamma = if kappa == 1.0 {
        0.0
    } else {
        kappa.ln() / natural_kappa.ln()
    };
    let scaled: Vec<f64> = raw.iter().map(|&v| v.powf(gamma)).collect();
    Ok(circulant_from_spectrum(&scaled))
}

/// Marginal of the unit-rate OU process at time t: mean e^-t mu,
/// covariance e^-2t Sigma + (1 - e^-2t) I.
pub fn ou_marginal(p0: &GaussianSpec, t: f64) -> GaussianSpec {
    let a = (-2.0 * t).exp();
    let vals = DVector::from_iterator(
        p0.dim(),
        p0.eigvals().iter().map(|&l| a * l + (1.0 - a)),
    );
    GaussianSpec::from_eigen((-t).exp() * p0.mean(), vals, p0.eigvecs().clone())
}

/// Exact score of the OU marginal at time t for Gaussian data:
/// -Sigma_t^-1 (x - e^-t mu).
pub fn analytic_score(p0: &GaussianSpec, t: f64, x: &Tensor) -> Result<Tensor> {
    if x.numel() != p0.dim() {
        return Err(Error::shape(
            "analytic_score",
            format!("dim {}", p0.dim()),
            format!("{}", x.numel()),
        ));
    }
    let a = (-2.0 * t).exp();
    let xv = DVector::from_column_slice(x.data());
    let centered = xv - (-t).exp() * p0.mean();
    let mut y = p0.eigvecs().transpose() * centered;
    for (yi, &l) in y.iter_mut().zip(p0.eigvals().iter()) {
        let sigma_t = a * l + (1.0 - a);
        if sigma_t <= 0.0 {
            return Err(Error::Singular("analytic_score".into()));
        }
        *yi /= sigma_t;
    }
    let s = -(p0.eigvecs() * y);
    Tensor::new(x.shape().to_vec(), s.iter().cloned().collect())
}

/// Closure form of [`analytic_score`] for driving reverse chains.
pub fn score_closure(p0: &GaussianSpec) -> impl Fn(&Tensor, f64) -> Tensor + Sync + '_ {
    move |x, t| analytic_score(p0, t, x).expect("analytic score on valid state")
}

/// KL(a || b) for Gaussians, in nats.
pub fn kl_gaussian(a: &GaussianSpec, b: &GaussianSpec) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::shape("kl_gaussian", format!("{}", a.dim()), format!("{}", b.dim())));
    }
    if b.min_eig() <= 0.0 {
        return Err(Error::Singular("kl_gaussian: second argument".into()));
    }
    if a.min_eig() <= 0.0 {
        return Err(Error::Singular("kl_gaussian: first argument".into()));
    }
    let d = a.dim() as f64;
    // Sigma_b^-1 through b's eigensystem.
    let qt = b.eigvecs().transpose();
    let inv_vals: Vec<f64> = b.eigvals().iter().map(|&l| 1.0 / l).collect();
    // tr(Sigma_b^-1 Sigma_a) = sum_ij invdiag_i * (Q^T Sigma_a Q)_ii
    let m = &qt * a.cov() * b.eigvecs();
    let mut trace = 0.0;
    for (i, &iv) in inv_vals.iter().enumerate() {
        trace += iv * m[(i, i)];
    }
    let delta = b.mean() - a.mean();
    let y = &qt * delta;
    let mut quad = 0.0;
    for (yi, &iv) in y.iter().zip(inv_vals.iter()) {
        quad += yi * yi * iv;
    }
    let ln_det_b: f64 = b.eigvals().iter().map(|&l| l.ln()).sum();
    let ln_det_a: f64 = a.eigvals().iter().map(|&l| l.ln()).sum();
    Ok(0.5 * (trace + quad - d + ln_det_b - ln_det_a))
}

/// The two explicit error terms of the Gaussian step-count bound, plus the
/// condition number and the resulting step bound at accuracy `eps`.
#[derive(Debug, Clone, Copy)]
pub struct BoundReport {
    pub psi_t: f64,
    pub psi_dt: f64,
    pub kappa: f64,
    pub n_bound: f64,
}

fn f_gap(t: f64) -> f64 {
    // t - ln(1+t), >= 0 for t >= 0; ln_1p keeps precision for small t.
    t - t.ln_1p()
}

/// Per-eigenvalue integrand of the discretization term:
/// 1/s - s*ln(s)/(2(s-1)) + (1 - 1/s)/3, with the removable singularity at
/// s = 1 evaluated by series.
fn dt_trace_term(s: f64) -> f64 {
    let u = s - 1.0;
    let middle = if u.abs() < 1e-8 {
        // s ln s / (s-1) = 1 + u/2 - u^2/6 + O(u^3)
        1.0 + 0.5 * u - u * u / 6.0
    } else {
        s * s.ln() / u
    };
    1.0 / s - 0.5 * middle + (1.0 - 1.0 / s) / 3.0
}

/// Evaluates the explicit bound terms for Gaussian data with covariance
/// `p0.cov()` under horizon T and uniform step dt.
pub fn theorem_bound(p0: &GaussianSpec, horizon: f64, dt: f64, eps: f64) -> Result<BoundReport> {
    if p0.min_eig() <= 0.0 {
        return Err(Error::Singular("theorem_bound".into()));
    }
    let mut tr_init = 0.0; // Tr((Sigma - I) Sigma)
    let mut tr_dt = 0.0;
    for &l in p0.eigvals().iter() {
        tr_init += (l - 1.0) * l;
        tr_dt += dt_trace_term(l);
    }
    let psi_t = f_gap((-4.0 * horizon).exp() * tr_init.abs());
    let psi_dt = f_gap(dt * tr_dt.abs());
    let kappa = condition_number(p0)?;
    Ok(BoundReport {
        psi_t,
        psi_dt,
        kappa,
        n_bound: min_steps_bound(eps, kappa)?,
    })
}

/// The step-count bound eps^-2 kappa^3.
pub fn min_steps_bound(eps: f64, kappa: f64) -> Result<f64> {
    if eps <= 0.0 {
        return Err(Error::invalid("min_steps_bound", "eps must be positive"));
    }
    if kappa < 1.0 {
        return Err(Error::invalid("min_steps_bound", "kappa must be >= 1"));
    }
    Ok(eps.powi(-2) * kappa.powi(3))
}

/// Exact KL of the data law from the discretized reverse chain's terminal
/// law, propagated in closed form. The chain starts at N(0, I); step n
/// (n = 0..N) sits at diffusion time tau = T - n*dt and applies the affine
/// map x' = (1 + dt) x + 2 dt * score_tau(x) + sqrt(2 dt) z with the exact
/// Gaussian score, which in the covariance eigenbasis is per-eigenvalue:
/// c' = m^2 c + 2 dt with m = 1 + dt - 2 dt / (e^-2tau l + 1 - e^-2tau).
pub fn exact_chain_kl(p0: &GaussianSpec, horizon: f64, steps: usize) -> Result<f64> {
    if steps == 0 {
        return Err(Error::invalid("exact_chain_kl", "steps must be >= 1"));
    }
    if horizon <= 0.0 {
        return Err(Error::invalid("exact_chain_kl", "horizon must be positive"));
    }
    if p0.min_eig() <= 0.0 {
        return Err(Error::Singular("exact_chain_kl".into()));
    }
    let dt = horizon / steps as f64;
    let d = p0.dim();
    let mut c = vec![1.0; d];
    for n in 0..steps {
        let tau = horizon - n as f64 * dt;
        let a = (-2.0 * tau).exp();
        for (ci, &l) in c.iter_mut().zip(p0.eigvals().iter()) {
            let sigma_tau = a * l + (1.0 - a);
            let m = 1.0 + dt - 2.0 * dt / sigma_tau;
            *ci = m * m * *ci + 2.0 * dt;
            if !ci.is_finite() {
                return Err(Error::Diverged { step: n });
            }
        }
    }
    let mut kl = 0.0;
    for (&ci, &l) in c.iter().zip(p0.eigvals().iter()) {
        kl += 0.5 * (l / ci - 1.0 + (ci / l).ln());
    }
    Ok(kl)
}

/// Smallest N on the given grid with exact_chain_kl / d <= eps, if any.
pub fn min_steps_for_kl(
    p0: &GaussianSpec,
    horizon: f64,
    eps_per_dim: f64,
    grid: &[usize],
) -> Result<Option<usize>> {
    let d = p0.dim() as f64;
    for &n in grid {
        if exact_chain_kl(p0, horizon, n)? / d <= eps_per_dim {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn rotated_diag(vals: &[f64], seed: u64) -> GaussianSpec {
        // Random orthogonal basis from QR of a random matrix (test-only).
        let d = vals.len();
        let mut rng = RngStream::new(seed, "rotated-diag");
        let m = DMatrix::from_fn(d, d, |_, _| rng.normal());
        let q = m.qr().q();
        GaussianSpec::from_eigen(DVector::zeros(d), DVector::from_row_slice(vals), q)
    }

    #[test]
    fn rejects_asymmetric_covariance() {
        let cov = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.2, 1.0]);
        assert!(GaussianSpec::new(DVector::zeros(2), cov).is_err());
    }

    #[test]
    fn condition_number_basics() {
        let id = GaussianSpec::standard(3);
        assert!((condition_number(&id).unwrap() - 1.0).abs() < 1e-14);
        let diag = GaussianSpec::new(
            DVector::zeros(2),
            DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 1.0])),
        )
        .unwrap();
        assert!((condition_number(&diag).unwrap() - 4.0).abs() < 1e-14);
        let singular = GaussianSpec::new(
            DVector::zeros(2),
            DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0])),
        )
        .unwrap();
        assert!(condition_number(&singular).is_err());
    }

    #[test]
    fn power_law_trace_and_kappa() {
        let spec = SpectrumSpec::natural_defaults(16).unwrap();
        let g = power_law_covariance(&spec);
        assert!((g.cov().trace() - 16.0).abs() < 1e-9);
        // kappa = (lambda + w_max) / lambda for eta = 1.
        let expected = (spec.scale + 8.0) / spec.scale;
        let got = condition_number(&g).unwrap();
        assert!((got - expected).abs() / expected < 1e-9, "kappa {got} vs {expected}");
    }

    #[test]
    fn power_law_flat_limit() {
        // Scale dominating every grid frequency flattens the spectrum, so the
        // normalized covariance approaches the identity.
        let spec = SpectrumSpec::new(8, 1.0, 1e9).unwrap();
        let g = power_law_covariance(&spec);
        assert!((condition_number(&g).unwrap() - 1.0).abs() < 1e-6);
        // The exact-kappa variant pins the condition number.
        let pinned =
            power_law_covariance_with_kappa(&SpectrumSpec::natural_defaults(16).unwrap(), 8.0).unwrap();
        assert!((condition_number(&pinned).unwrap() - 8.0).abs() < 1e-9);
    }

    #[test]
    fn ou_marginal_limits() {
        let g = rotated_diag(&[2.0, 0.5], 3);
        let at0 = ou_marginal(&g, 0.0);
        assert!((at0.cov() - g.cov()).abs().max() < 1e-12);
        let far = ou_marginal(&g, 40.0);
        assert!((far.cov() - DMatrix::<f64>::identity(2, 2)).abs().max() < 1e-12);
        assert!(far.mean().abs().max() < 1e-12);

        // t = ln(2)/2, Sigma = 2I: covariance = 1.5 I.
        let two_i = GaussianSpec::new(DVector::zeros(2), DMatrix::identity(2, 2) * 2.0).unwrap();
        let mid = ou_marginal(&two_i, 0.5 * 2.0_f64.ln());
        assert!((mid.cov() - DMatrix::<f64>::identity(2, 2) * 1.5).abs().max() < 1e-12);
    }

    #[test]
    fn score_of_standard_normal_is_negative_x() {
        let g = GaussianSpec::standard(3);
        let x = Tensor::vector(vec![0.3, -1.2, 2.0]);
        for t in [0.0, 0.5, 3.0] {
            let s = analytic_score(&g, t, &x).unwrap();
            assert!(s.sub(&x.scale(-1.0)).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn score_vanishes_at_shifted_mode() {
        let mut cov = DMatrix::identity(2, 2);
        cov[(0, 0)] = 2.0;
        let g = GaussianSpec::new(DVector::from_vec(vec![1.0, -2.0]), cov).unwrap();
        let t = 0.7;
        let e = (-t).exp();
        let mode = Tensor::vector(vec![e * 1.0, e * -2.0]);
        let s = analytic_score(&g, t, &mode).unwrap();
        assert!(s.max_abs() < 1e-12);
    }

    #[test]
    fn score_matches_log_density_gradient() {
        let g = rotated_diag(&[3.0, 1.0, 0.4], 9);
        let t = 0.35;
        let pt = ou_marginal(&g, t);
        let mut rng = RngStream::new(4, "score-fd");
        let x: Vec<f64> = (0..3).map(|_| rng.normal()).collect();
        let s = analytic_score(&g, t, &Tensor::vector(x.clone())).unwrap();
        let h = 1e-6;
        for i in 0..3 {
            let mut xp = DVector::from_row_slice(&x);
            let mut xm = xp.clone();
            xp[i] += h;
            xm[i] -= h;
            let fd = (pt.log_density(&xp).unwrap() - pt.log_density(&xm).unwrap()) / (2.0 * h);
            assert!(
                (fd - s.data()[i]).abs() < 1e-6,
                "coord {i}: fd {fd} vs analytic {}",
                s.data()[i]
            );
        }
    }

    #[test]
    fn score_is_linear_in_x() {
        let g = rotated_diag(&[2.0, 0.7, 1.1], 21);
        let t = 0.9;
        let mut rng = RngStream::new(5, "linear");
        let x = Tensor::from_fn(&[3], |_| rng.normal());
        let y = Tensor::from_fn(&[3], |_| rng.normal());
        let (a, b) = (1.7, -0.4);
        let combo = x.scale(a).add(&y.scale(b)).unwrap();
        let lhs = analytic_score(&g, t, &combo).unwrap();
        let rhs = analytic_score(&g, t, &x)
            .unwrap()
            .scale(a)
            .add(&analytic_score(&g, t, &y).unwrap().scale(b))
            .unwrap();
        assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn kl_identities() {
        let id = GaussianSpec::standard(4);
        assert!(kl_gaussian(&id, &id).unwrap().abs() < 1e-14);
        let shifted = GaussianSpec::new(
            DVector::from_vec(vec![0.5, -1.0, 0.0, 2.0]),
            DMatrix::identity(4, 4),
        )
        .unwrap();
        let expected = 0.5 * (0.25 + 1.0 + 0.0 + 4.0);
        assert!((kl_gaussian(&shifted, &id).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn kl_nonnegative_on_random_pairs() {
        for seed in 0..5 {
            let a = rotated_diag(&[1.5, 0.5, 2.0], 100 + seed);
            let b = rotated_diag(&[0.8, 1.2, 1.0], 200 + seed);
            let kl = kl_gaussian(&a, &b).unwrap();
            assert!(kl >= -1e-10, "kl {kl}");
            assert!(kl_gaussian(&a, &a).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn kl_matches_monte_carlo() {
        let a = rotated_diag(&[1.5, 0.6, 1.0], 31);
        let b = rotated_diag(&[0.9, 1.3, 0.7], 32);
        let exact = kl_gaussian(&a, &b).unwrap();
        let mut rng = RngStream::new(77, "kl-mc");
        let n = 1_000_000usize;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let x = a.sample(&mut rng);
            let v = a.log_density(&x).unwrap() - b.log_density(&x).unwrap();
            sum += v;
            sum_sq += v * v;
        }
        let mc = sum / n as f64;
        let var = sum_sq / n as f64 - mc * mc;
        let se = (var / n as f64).sqrt();
        assert!(
            (mc - exact).abs() <= 3.0 * se,
            "mc {mc} exact {exact} se {se}"
        );
    }

    #[test]
    fn bound_terms_identity_case() {
        let id = GaussianSpec::standard(2);
        let report = theorem_bound(&id, 3.0, 0.01, 0.1).unwrap();
        assert_eq!(report.psi_t, 0.0);
        // Per-eigenvalue trace term at s = 1 is 1/2; d = 2 gives trace 1.
        let expected = 0.01 - (1.01f64).ln();
        assert!((report.psi_dt - expected).abs() < 1e-12);
        assert!((expected - 4.9669e-5).abs() < 1e-8);
        assert!((report.kappa - 1.0).abs() < 1e-12);
        assert!((report.n_bound - 100.0).abs() < 1e-9);
    }

    #[test]
    fn f_gap_properties() {
        assert_eq!(f_gap(0.0), 0.0);
        let mut prev = 0.0;
        for i in 1..50 {
            let t = i as f64 * 0.1;
            let v = f_gap(t);
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn steps_bound_arithmetic() {
        assert!((min_steps_bound(0.1, 2.0).unwrap() - 800.0).abs() < 1e-9);
        assert!((min_steps_bound(1.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
        let base = min_steps_bound(0.2, 3.0).unwrap();
        let doubled = min_steps_bound(0.2, 6.0).unwrap();
        assert!((doubled / base - 8.0).abs() < 1e-12);
    }

    #[test]
    fn chain_kl_identity_covariance_converges() {
        let id = GaussianSpec::standard(3);
        let kl_small = exact_chain_kl(&id, 8.0, 16).unwrap();
        let kl_large = exact_chain_kl(&id, 8.0, 4096).unwrap();
        assert!(kl_large < kl_small);
        assert!(kl_large < 1e-6, "kl {kl_large}");
    }

    #[test]
    fn chain_kl_decreases_with_steps() {
        let spec = SpectrumSpec::natural_defaults(8).unwrap();
        let g = power_law_covariance_with_kappa(&spec, 4.0).unwrap();
        let coarse = exact_chain_kl(&g, 5.0, 16).unwrap();
        let fine = exact_chain_kl(&g, 5.0, 256).unwrap();
        assert!(fine < coarse, "fine {fine} coarse {coarse}");
    }

    #[test]
    fn chain_kl_one_step_scalar_matches_hand_recurrence() {
        let s = 1.8;
        let g = GaussianSpec::new(DVector::zeros(1), DMatrix::from_element(1, 1, s)).unwrap();
        let horizon = 0.9;
        let got = exact_chain_kl(&g, horizon, 1).unwrap();
        // One step: tau = T, dt = T.
        let a = (-2.0 * horizon).exp();
        let sigma_tau = a * s + (1.0 - a);
        let m = 1.0 + horizon - 2.0 * horizon / sigma_tau;
        let c = m * m + 2.0 * horizon;
        let expected = 0.5 * (s / c - 1.0 + (c / s).ln());
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn required_steps_grow_with_kappa() {
        let spec = SpectrumSpec::natural_defaults(8).unwrap();
        let grid: Vec<usize> = (2..=12).map(|p| 1usize << p).collect();
        let mut previous = 0usize;
        for kappa in [2.0, 8.0, 32.0] {
            let g = power_law_covariance_with_kappa(&spec, kappa).unwrap();
            let n = min_steps_for_kl(&g, 6.0, 0.01, &grid).unwrap().expect("grid large enough");
            assert!(n >= previous, "kappa {kappa}: N* {n} < {previous}");
            previous = n;
        }
    }
}
