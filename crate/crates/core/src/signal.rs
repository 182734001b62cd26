//! Random instances of the non-orthogonal uplink: pilots, activity, Rayleigh
//! channels, white noise, the received block and its sample covariance.
//!
//! Complex Gaussians are circularly symmetric: real and imaginary parts are
//! independent with half the stated variance each. The Gaussian pilot scheme
//! uses per-entry variance `1/M`, so every pilot has unit expected energy.
//! The unit-sphere scheme normalizes a complex Gaussian vector, which is
//! uniform on the complex unit sphere of `C^M`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{complex_normal, RngStream};

pub type CMatrix = DMatrix<Complex64>;

/// Random design of the pilot book.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PilotScheme {
    Gaussian,
    UnitSphere,
}

impl PilotScheme {
    pub const ALL: [PilotScheme; 2] = [PilotScheme::Gaussian, PilotScheme::UnitSphere];

    pub fn as_str(&self) -> &'static str {
        match self {
            PilotScheme::Gaussian => "gaussian",
            PilotScheme::UnitSphere => "unit_sphere",
        }
    }
}

impl fmt::Display for PilotScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PilotScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "gaussian" => Ok(PilotScheme::Gaussian),
            "unit_sphere" | "unitsphere" | "sphere" => Ok(PilotScheme::UnitSphere),
            other => Err(Error::InvalidParameter(format!("unknown pilot scheme '{other}'"))),
        }
    }
}

/// `M x N` pilot book, one column per user.
#[derive(Clone, Debug, PartialEq)]
pub struct PilotMatrix {
    entries: CMatrix,
    scheme: PilotScheme,
}

impl PilotMatrix {
    /// Wraps explicit entries. Unlike [`draw_pilot_matrix`] this accepts
    /// `M >= N`, which is handy for orthogonal test books.
    pub fn from_entries(entries: CMatrix, scheme: PilotScheme) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(Error::InvalidDimension("pilot matrix must be non-empty".into()));
        }
        Ok(Self { entries, scheme })
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn scheme(&self) -> PilotScheme {
        self.scheme
    }

    pub fn m(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n(&self) -> usize {
        self.entries.ncols()
    }

    /// `|p_i^H p_j|^2` for all pairs, as a dense `N x N` real matrix.
    pub fn cross_correlation_sq(&self) -> DMatrix<f64> {
        let gram = self.entries.adjoint() * &self.entries;
        gram.map(|z| z.norm_sqr())
    }
}

/// Draws a pilot book under `scheme`. Requires `1 <= m < n`.
pub fn draw_pilot_matrix<R: Rng + ?Sized>(
    scheme: PilotScheme,
    m: usize,
    n: usize,
    rng: &mut R,
) -> Result<PilotMatrix> {
    if m == 0 || n == 0 || m >= n {
        return Err(Error::InvalidDimension(format!(
            "pilot book needs 1 <= M < N, got M = {m}, N = {n}"
        )));
    }
    let mut data = Vec::with_capacity(m * n);
    for _ in 0..n {
        match scheme {
            PilotScheme::Gaussian => {
                let var = 1.0 / m as f64;
                data.extend((0..m).map(|_| complex_normal(rng, var)));
            }
            PilotScheme::UnitSphere => {
                let col: Vec<Complex64> = (0..m).map(|_| complex_normal(rng, 1.0)).collect();
                let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                data.extend(col.into_iter().map(|z| z / norm));
            }
        }
    }
    Ok(PilotMatrix {
        entries: CMatrix::from_column_slice(m, n, &data),
        scheme,
    })
}

/// Binary activity vector; `1` marks an active user.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ActivityPattern {
    bits: Vec<u8>,
}

impl ActivityPattern {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidParameter(format!("activity entry {b} is not 0 or 1")));
        }
        Ok(Self { bits })
    }

    pub fn zeros(n: usize) -> Self {
        Self { bits: vec![0; n] }
    }

    /// Pattern whose bit `i` is bit `i` of `index`.
    pub fn from_index(n: usize, index: usize) -> Self {
        Self {
            bits: (0..n).map(|i| ((index >> i) & 1) as u8).collect(),
        }
    }

    /// Integer encoding with `alpha_i` as bit `i`.
    pub fn index(&self) -> usize {
        self.bits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | ((b as usize) << i))
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_active(&self, i: usize) -> bool {
        self.bits[i] == 1
    }

    /// Number of positions where the two patterns differ.
    pub fn hamming(&self, other: &ActivityPattern) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }
}

/// i.i.d. Bernoulli(`p_active`) activity for `n` users.
pub fn draw_activity<R: Rng + ?Sized>(n: usize, p_active: f64, rng: &mut R) -> Result<ActivityPattern> {
    if !(0.0..=1.0).contains(&p_active) {
        return Err(Error::InvalidParameter(format!(
            "activation probability {p_active} outside [0, 1]"
        )));
    }
    let bits = (0..n).map(|_| rng.random_bool(p_active) as u8).collect();
    Ok(ActivityPattern { bits })
}

/// Per-entry noise variance for an SNR in dB; `+inf` gives the noiseless case.
pub fn noise_variance_from_snr(snr_db: f64, m: usize) -> f64 {
    assert!(m >= 1, "noise_variance_from_snr needs m >= 1");
    if snr_db == f64::INFINITY {
        return 0.0;
    }
    10f64.powf(-snr_db / 10.0) / m as f64
}

/// One sampled realization of the uplink.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    pub pilots: PilotMatrix,
    /// Ground-truth activity.
    pub activity: ActivityPattern,
    /// `K x N` Rayleigh channel, column `i` belongs to user `i`.
    pub channel: CMatrix,
    /// `M x K` additive noise.
    pub noise: CMatrix,
    /// `M x K` received block.
    pub received: CMatrix,
    /// `M x M` sample covariance of the received columns.
    pub sample_cov: CMatrix,
    pub snr_db: f64,
    pub k_antennas: usize,
}

/// `P * Diag(alpha) * H^T`, the noiseless part of the received block.
pub fn noiseless_received(pilots: &PilotMatrix, activity: &ActivityPattern, channel: &CMatrix) -> Result<CMatrix> {
    let n = pilots.n();
    if activity.len() != n || channel.ncols() != n {
        return Err(Error::InvalidDimension(format!(
            "pilots have {n} users, activity {}, channel {}",
            activity.len(),
            channel.ncols()
        )));
    }
    let mut gated = pilots.entries().clone();
    for (i, mut col) in gated.column_iter_mut().enumerate() {
        if !activity.is_active(i) {
            col.fill(Complex64::new(0.0, 0.0));
        }
    }
    Ok(gated * channel.transpose())
}

/// Draws activity, channel and noise for a fixed pilot book.
///
/// Noise is drawn even at infinite SNR (and scaled to zero) so that the
/// stream consumption, and hence the channel of later trials, does not
/// depend on the SNR.
pub fn synthesize_instance<R: Rng + ?Sized>(
    pilots: &PilotMatrix,
    p_active: f64,
    k: usize,
    snr_db: f64,
    rng: &mut R,
) -> Result<ProblemInstance> {
    if k == 0 {
        return Err(Error::InvalidDimension("number of antennas K must be >= 1".into()));
    }
    if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
        return Err(Error::InvalidParameter(format!("SNR {snr_db} dB is not usable")));
    }
    let (m, n) = (pilots.m(), pilots.n());
    let activity = draw_activity(n, p_active, rng)?;

    let h: Vec<Complex64> = (0..k * n).map(|_| complex_normal(rng, 1.0)).collect();
    let channel = CMatrix::from_column_slice(k, n, &h);

    let xi2 = noise_variance_from_snr(snr_db, m);
    let w: Vec<Complex64> = (0..m * k).map(|_| complex_normal(rng, 1.0) * xi2.sqrt()).collect();
    let noise = CMatrix::from_column_slice(m, k, &w);

    let received = noiseless_received(pilots, &activity, &channel)? + &noise;
    let sample_cov = sample_covariance(&received)?;
    Ok(ProblemInstance {
        pilots: pilots.clone(),
        activity,
        channel,
        noise,
        received,
        sample_cov,
        snr_db,
        k_antennas: k,
    })
}

/// `(1/K) Y Y^H`, with the lower triangle mirrored from the upper one so the
/// result is exactly Hermitian.
pub fn sample_covariance(y: &CMatrix) -> Result<CMatrix> {
    let k = y.ncols();
    if k == 0 {
        return Err(Error::InvalidDimension("sample covariance needs K >= 1 columns".into()));
    }
    let m = y.nrows();
    let mut cov = (y * y.adjoint()).unscale(k as f64);
    for r in 0..m {
        cov[(r, r)].im = 0.0;
        for c in r + 1..m {
            cov[(c, r)] = cov[(r, c)].conj();
        }
    }
    Ok(cov)
}

/// Everything needed to sample a trial: pilot design, sizes, prior and SNR.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InstanceParams {
    pub scheme: PilotScheme,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub snr_db: f64,
    pub p_active: f64,
}

impl InstanceParams {
    /// Noiseless instance parameters with the default activation prior of 1/2.
    pub fn noiseless(scheme: PilotScheme, m: usize, n: usize, k: usize) -> Self {
        Self {
            scheme,
            m,
            n,
            k,
            snr_db: f64::INFINITY,
            p_active: 0.5,
        }
    }

    pub fn with_snr(self, snr_db: f64) -> Self {
        Self { snr_db, ..self }
    }

    /// Draws pilots, then activity, channel and noise, all from `stream`.
    pub fn sample(&self, stream: RngStream) -> Result<ProblemInstance> {
        let mut rng = stream.rng();
        let pilots = draw_pilot_matrix(self.scheme, self.m, self.n, &mut rng)?;
        synthesize_instance(&pilots, self.p_active, self.k, self.snr_db, &mut rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frob(a: &CMatrix) -> f64 {
        a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn unit_sphere_columns_are_unit() {
        let p = draw_pilot_matrix(PilotScheme::UnitSphere, 4, 5, &mut RngStream::new(7, 0).rng()).unwrap();
        for col in p.entries().column_iter() {
            let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_pilots_are_deterministic() {
        let a = draw_pilot_matrix(PilotScheme::Gaussian, 4, 5, &mut RngStream::new(7, 0).rng()).unwrap();
        let b = draw_pilot_matrix(PilotScheme::Gaussian, 4, 5, &mut RngStream::new(7, 0).rng()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn pilot_dimension_errors() {
        let mut rng = RngStream::new(1, 0).rng();
        for (m, n) in [(5, 5), (6, 5), (0, 5), (0, 0)] {
            assert!(matches!(
                draw_pilot_matrix(PilotScheme::Gaussian, m, n, &mut rng),
                Err(Error::InvalidDimension(_))
            ));
        }
    }

    #[test]
    fn degenerate_activity() {
        let mut rng = RngStream::new(3, 0).rng();
        assert_eq!(draw_activity(5, 0.0, &mut rng).unwrap().bits(), &[0; 5]);
        assert_eq!(draw_activity(5, 1.0, &mut rng).unwrap().bits(), &[1; 5]);
        assert!(draw_activity(5, 1.5, &mut rng).is_err());
        assert!(draw_activity(5, -0.1, &mut rng).is_err());
    }

    #[test]
    fn activity_rejects_non_binary() {
        assert!(ActivityPattern::new(vec![0, 2]).is_err());
        let a = ActivityPattern::new(vec![1, 0, 1]).unwrap();
        assert_eq!(a.index(), 0b101);
        assert_eq!(ActivityPattern::from_index(3, 5), a);
    }

    #[test]
    fn noise_variance_values() {
        assert_eq!(noise_variance_from_snr(f64::INFINITY, 4), 0.0);
        assert!((noise_variance_from_snr(0.0, 4) - 0.25).abs() < 1e-15);
        assert!((noise_variance_from_snr(10.0, 4) - 0.025).abs() < 1e-15);
    }

    #[test]
    fn silent_noiseless_instance_is_zero() {
        let mut rng = RngStream::new(5, 0).rng();
        let p = draw_pilot_matrix(PilotScheme::Gaussian, 4, 5, &mut rng).unwrap();
        let inst = synthesize_instance(&p, 0.0, 16, f64::INFINITY, &mut rng).unwrap();
        assert!(inst.received.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
        assert!(inst.sample_cov.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn reconstruction_identity() {
        let mut rng = RngStream::new(9, 4).rng();
        let p = draw_pilot_matrix(PilotScheme::UnitSphere, 4, 5, &mut rng).unwrap();
        let inst = synthesize_instance(&p, 0.5, 32, 5.0, &mut rng).unwrap();
        let rebuilt = noiseless_received(&p, &inst.activity, &inst.channel).unwrap() + &inst.noise;
        assert_eq!(rebuilt, inst.received);
        let mut direct = CMatrix::zeros(4, 32);
        for i in 0..5 {
            if inst.activity.is_active(i) {
                direct += p.entries().column(i) * inst.channel.column(i).transpose();
            }
        }
        direct += &inst.noise;
        assert!(frob(&(direct - &inst.received)) < 1e-13);
    }

    #[test]
    fn covariance_edge_cases() {
        assert!(sample_covariance(&CMatrix::zeros(4, 0)).is_err());
        let zero = sample_covariance(&CMatrix::zeros(3, 5)).unwrap();
        assert!(zero.iter().all(|z| z.norm() == 0.0));

        let mut rng = RngStream::new(2, 2).rng();
        let y1 = CMatrix::from_fn(4, 1, |_, _| complex_normal(&mut rng, 1.0));
        let c = sample_covariance(&y1).unwrap();
        let outer = &y1 * y1.adjoint();
        assert!(frob(&(c.clone() - outer)) < 1e-14);
        let sv = c.singular_values();
        assert!(sv[1] < 1e-12 * sv[0]);
    }

    #[test]
    fn covariance_is_hermitian_psd() {
        let mut rng = RngStream::new(11, 0).rng();
        let y = CMatrix::from_fn(4, 7, |_, _| complex_normal(&mut rng, 3.0));
        let c = sample_covariance(&y).unwrap();
        let skew = (&c - c.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(skew <= 1e-12);
        let eig = c.symmetric_eigenvalues();
        assert!(eig.iter().all(|&e| e >= -1e-10));
    }
}
