//! Spatially multiplexed PSK transmission and linear MMSE joint detection.
//!
//! Noise convention: every receive-antenna noise sample has real and
//! imaginary parts of variance `sigma_w2` *each*. With unit-energy symbols
//! this makes the matched-filter decision-statistic noise variance equal to
//! `sigma_w2`, so `gamma = 1 / sigma_w2` is directly the BPSK decision SNR
//! and a perfect-CSI SISO link has bit error rate `Q(sqrt(gamma))`.

use num_complex::Complex64;
use rand::Rng;

use crate::numerics::{gauss_jordan_inverse, ComplexMatrix};
use crate::{Error, Result};

/// Unit-modulus PSK alphabet with Gray bit labels.
///
/// Point `k` sits at angle `2 pi k / 2^m` and carries the Gray code of `k`,
/// so neighboring points differ in one bit. BPSK is `{+1, -1}` with labels
/// `{0, 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    bits_per_symbol: usize,
    points: Vec<Complex64>,
    labels: Vec<u32>,
}

impl Constellation {
    pub fn psk(bits_per_symbol: usize) -> Result<Self> {
        if !(1..=8).contains(&bits_per_symbol) {
            return Err(Error::Domain {
                name: "bits_per_symbol",
                value: bits_per_symbol as f64,
                expected: "1..=8",
            });
        }
        let order = 1usize << bits_per_symbol;
        let mut points = Vec::with_capacity(order);
        let mut labels = Vec::with_capacity(order);
        for k in 0..order {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / order as f64;
            // exact values for the axis-aligned points keep BPSK slicing
            // free of spurious imaginary parts
            let point = match (k * 4) % order {
                0 if k * 4 / order == 0 => Complex64::new(1.0, 0.0),
                0 if k * 4 / order == 1 => Complex64::new(0.0, 1.0),
                0 if k * 4 / order == 2 => Complex64::new(-1.0, 0.0),
                0 if k * 4 / order == 3 => Complex64::new(0.0, -1.0),
                _ => Complex64::from_polar(1.0, angle),
            };
            points.push(point);
            labels.push((k ^ (k >> 1)) as u32);
        }
        Ok(Self {
            bits_per_symbol,
            points,
            labels,
        })
    }

    pub fn bpsk() -> Self {
        Self::psk(1).expect("BPSK is always constructible")
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Nearest point index in Euclidean distance; ties keep the lowest
    /// index, which for BPSK maps a zero real part to `+1`.
    fn nearest(&self, soft: Complex64) -> usize {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (idx, &p) in self.points.iter().enumerate() {
            let d = (soft - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = idx;
            }
        }
        best
    }
}

/// A transmitted or detected symbol vector: one constellation point and its
/// Gray label per sub-stream.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolVector {
    symbols: Vec<Complex64>,
    labels: Vec<u32>,
}

impl SymbolVector {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Column-matrix view used by the detector and tracker.
    pub fn as_column(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.symbols.len(), 1, |i, _| self.symbols[i])
    }
}

/// Per-dimension noise variance for a given Eb/N0 in dB:
/// `sigma_w2 = 1 / (bits_per_symbol * 10^(ebn0_db / 10))`.
pub fn noise_variance_from_ebn0(ebn0_db: f64, bits_per_symbol: usize) -> f64 {
    assert!(bits_per_symbol >= 1, "bits_per_symbol must be >= 1");
    1.0 / (bits_per_symbol as f64 * 10f64.powf(ebn0_db / 10.0))
}

/// Draws `n_tx` i.i.d. uniform symbols from the constellation.
pub fn draw_symbols<R: Rng + ?Sized>(
    constellation: &Constellation,
    n_tx: usize,
    rng: &mut R,
) -> SymbolVector {
    let order = constellation.order();
    let mut symbols = Vec::with_capacity(n_tx);
    let mut labels = Vec::with_capacity(n_tx);
    for _ in 0..n_tx {
        let k = rng.random_range(0..order);
        symbols.push(constellation.points[k]);
        labels.push(constellation.labels[k]);
    }
    SymbolVector { symbols, labels }
}

/// Builds a symbol vector from constellation point indices (training
/// sequences, tests).
pub fn symbols_from_indices(constellation: &Constellation, indices: &[usize]) -> SymbolVector {
    let symbols = indices.iter().map(|&k| constellation.points[k]).collect();
    let labels = indices.iter().map(|&k| constellation.labels[k]).collect();
    SymbolVector { symbols, labels }
}

/// Applies the channel and additive noise: `r = H s + w`, each noise entry
/// having per-dimension variance `sigma_w2`.
pub fn transmit<R: Rng + ?Sized>(
    h: &ComplexMatrix,
    s: &SymbolVector,
    sigma_w2: f64,
    rng: &mut R,
) -> Result<ComplexMatrix> {
    if h.cols() != s.len() {
        return Err(Error::DimensionMismatch(format!(
            "channel has {} inputs, symbol vector has {}",
            h.cols(),
            s.len()
        )));
    }
    if sigma_w2 < 0.0 {
        return Err(Error::Domain {
            name: "sigma_w2",
            value: sigma_w2,
            expected: ">= 0",
        });
    }
    let mut r = h.mul(&s.as_column())?;
    for i in 0..r.rows() {
        // per-dimension variance sigma_w2 <-> total complex variance 2*sigma_w2
        let w = crate::numerics::complex_gaussian_sample(2.0 * sigma_w2, rng)?;
        r.set(i, 0, r.get(i, 0) + w);
    }
    Ok(r)
}

/// Linear MMSE joint detector:
/// `(H^H H + sigma_w2 I)^{-1} H^H r`, returning the soft symbol estimates.
pub fn mmse_detect(
    h_hat: &ComplexMatrix,
    r: &ComplexMatrix,
    sigma_w2: f64,
) -> Result<ComplexMatrix> {
    if r.rows() != h_hat.rows() || r.cols() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "received vector {}x{} does not match channel {}x{}",
            r.rows(),
            r.cols(),
            h_hat.rows(),
            h_hat.cols()
        )));
    }
    let hh = h_hat.hermitian();
    let mut gram = hh.mul(h_hat)?;
    for i in 0..gram.rows() {
        gram.set(i, i, gram.get(i, i) + sigma_w2);
    }
    let inv = gauss_jordan_inverse(&gram)?;
    inv.mul(&hh)?.mul(r)
}

/// Hard decision: per-entry nearest constellation point.
pub fn slice(soft: &ComplexMatrix, constellation: &Constellation) -> SymbolVector {
    let mut symbols = Vec::with_capacity(soft.rows());
    let mut labels = Vec::with_capacity(soft.rows());
    for i in 0..soft.rows() {
        let k = constellation.nearest(soft.get(i, 0));
        symbols.push(constellation.points[k]);
        labels.push(constellation.labels[k]);
    }
    SymbolVector { symbols, labels }
}

/// Number of positions where the decided symbol differs from the sent one.
pub fn count_symbol_errors(sent: &SymbolVector, decided: &SymbolVector) -> Result<usize> {
    if sent.len() != decided.len() {
        return Err(Error::DimensionMismatch(format!(
            "sent {} symbols, decided {}",
            sent.len(),
            decided.len()
        )));
    }
    Ok(sent
        .labels
        .iter()
        .zip(&decided.labels)
        .filter(|(a, b)| a != b)
        .count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{complex_gaussian_matrix, seeded_rng};
    use proptest::prelude::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bpsk_points() {
        let c = Constellation::bpsk();
        assert_eq!(c.points(), &[cx(1.0, 0.0), cx(-1.0, 0.0)]);
        assert_eq!(c.labels, &[0, 1]);
    }

    #[test]
    fn psk_points_have_unit_modulus_and_gray_labels() {
        for m in 1..=4 {
            let c = Constellation::psk(m).unwrap();
            assert_eq!(c.order(), 1 << m);
            for &p in c.points() {
                assert!((p.norm() - 1.0).abs() < 1e-12);
            }
            // adjacent labels differ in exactly one bit
            for k in 0..c.order() {
                let next = (k + 1) % c.order();
                let diff = c.labels[k] ^ c.labels[next];
                assert_eq!(diff.count_ones(), 1);
            }
        }
    }

    #[test]
    fn noise_variance_examples() {
        assert_eq!(noise_variance_from_ebn0(0.0, 1), 1.0);
        assert!((noise_variance_from_ebn0(5.0, 1) - 0.31622776601683794).abs() < 1e-15);
        assert!((noise_variance_from_ebn0(10.0, 2) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn draw_symbols_alphabet_contract() {
        let c = Constellation::bpsk();
        let mut rng = seeded_rng(21);
        let s = draw_symbols(&c, 4, &mut rng);
        assert_eq!(s.len(), 4);
        for &x in s.symbols() {
            assert!(x == cx(1.0, 0.0) || x == cx(-1.0, 0.0));
        }
    }

    #[test]
    fn bpsk_draw_statistics() {
        let c = Constellation::bpsk();
        let mut rng = seeded_rng(22);
        let n = 100_000;
        let mut sum = Complex64::ZERO;
        for _ in 0..n {
            let s = draw_symbols(&c, 1, &mut rng);
            sum += s.symbols()[0];
            assert_eq!(s.symbols()[0].norm_sqr(), 1.0);
        }
        let mean = sum / n as f64;
        // sd of the mean is 1/sqrt(n); 0.01 is a ~3-sigma band
        assert!(mean.norm() < 0.01, "mean = {mean}");
    }

    #[test]
    fn qpsk_symbol_covariance_is_identity() {
        let c = Constellation::psk(2).unwrap();
        let mut rng = seeded_rng(23);
        let n = 100_000;
        let mut diag = 0.0;
        let mut off = Complex64::ZERO;
        for _ in 0..n {
            let s = draw_symbols(&c, 2, &mut rng);
            diag += s.symbols()[0].norm_sqr();
            off += s.symbols()[0] * s.symbols()[1].conj();
        }
        assert!((diag / n as f64 - 1.0).abs() < 1e-12);
        assert!((off / n as f64).norm() < 0.01);
    }

    #[test]
    fn noiseless_identity_channel() {
        let c = Constellation::bpsk();
        let h = ComplexMatrix::identity(2);
        let s = symbols_from_indices(&c, &[0, 1]);
        let mut rng = seeded_rng(24);
        let r = transmit(&h, &s, 0.0, &mut rng).unwrap();
        assert_eq!(r.get(0, 0), cx(1.0, 0.0));
        assert_eq!(r.get(1, 0), cx(-1.0, 0.0));
    }

    #[test]
    fn noise_power_per_dimension() {
        let c = Constellation::bpsk();
        let h = ComplexMatrix::zeros(1, 1);
        let s = symbols_from_indices(&c, &[0]);
        let mut rng = seeded_rng(25);
        let sigma_w2 = 0.31622776601683794;
        let n = 100_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let r = transmit(&h, &s, sigma_w2, &mut rng).unwrap();
            acc += r.get(0, 0).re * r.get(0, 0).re;
        }
        let var = acc / n as f64;
        // sd of a variance estimate ~ var * sqrt(2/n)
        assert!((var - sigma_w2).abs() < 0.006, "re variance = {var}");
    }

    #[test]
    fn transmit_noise_has_zero_mean() {
        let c = Constellation::bpsk();
        let mut rng = seeded_rng(26);
        let h = complex_gaussian_matrix(4, 4, 1.0, &mut rng).unwrap();
        let s = draw_symbols(&c, 4, &mut rng);
        let clean = h.mul(&s.as_column()).unwrap();
        let n = 10_000;
        let mut acc = Complex64::ZERO;
        for _ in 0..n {
            let r = transmit(&h, &s, 0.5, &mut rng).unwrap();
            for i in 0..4 {
                acc += r.get(i, 0) - clean.get(i, 0);
            }
        }
        assert!((acc / (4 * n) as f64).norm() < 0.02);
    }

    #[test]
    fn transmit_dimension_mismatch() {
        let c = Constellation::bpsk();
        let h = ComplexMatrix::identity(2);
        let s = symbols_from_indices(&c, &[0, 0, 0]);
        let mut rng = seeded_rng(27);
        assert!(transmit(&h, &s, 0.1, &mut rng).is_err());
    }

    #[test]
    fn mmse_zero_forcing_limit() {
        let mut rng = seeded_rng(28);
        let h = complex_gaussian_matrix(3, 3, 1.0, &mut rng)
            .unwrap()
            .add(&ComplexMatrix::identity(3).scale(2.0))
            .unwrap();
        let c = Constellation::bpsk();
        let s = symbols_from_indices(&c, &[0, 1, 0]);
        let r = h.mul(&s.as_column()).unwrap();
        let soft = mmse_detect(&h, &r, 1e-14).unwrap();
        assert!(soft.max_abs_diff(&s.as_column()).unwrap() < 1e-9);
    }

    #[test]
    fn mmse_orthonormal_columns_halve() {
        // H with orthonormal columns and sigma_w2 = 1: (I + I)^{-1} = I/2
        let h = ComplexMatrix::identity(2);
        let r = ComplexMatrix::column(&[cx(0.6, -0.2), cx(-1.0, 0.4)]).unwrap();
        let soft = mmse_detect(&h, &r, 1.0).unwrap();
        assert!(soft.max_abs_diff(&r.scale(0.5)).unwrap() < 1e-14);
    }

    #[test]
    fn mmse_push_through_identity() {
        // (H^H H + s I_M)^{-1} H^H r == H^H (H H^H + s I_N)^{-1} r
        let mut rng = seeded_rng(29);
        for _ in 0..20 {
            let h = complex_gaussian_matrix(4, 4, 1.0, &mut rng).unwrap();
            let r = complex_gaussian_matrix(4, 1, 1.0, &mut rng).unwrap();
            let sigma_w2 = 0.3;
            let lhs = mmse_detect(&h, &r, sigma_w2).unwrap();

            let hh = h.hermitian();
            let mut outer = h.mul(&hh).unwrap();
            for i in 0..outer.rows() {
                outer.set(i, i, outer.get(i, i) + sigma_w2);
            }
            let rhs = hh.mul(&gauss_jordan_inverse(&outer).unwrap()).unwrap();
            let rhs = rhs.mul(&r).unwrap();
            assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-9);
        }
    }

    #[test]
    fn bpsk_slicing_is_signum_with_tie_to_plus_one() {
        let c = Constellation::bpsk();
        let soft = ComplexMatrix::column(&[cx(0.3, 0.9), cx(-1.2, 0.1), cx(0.0, -0.5)]).unwrap();
        let out = slice(&soft, &c);
        assert_eq!(out.symbols(), &[cx(1.0, 0.0), cx(-1.0, 0.0), cx(1.0, 0.0)]);
    }

    #[test]
    fn qpsk_slicing_nearest_point() {
        let c = Constellation::psk(2).unwrap();
        let soft = ComplexMatrix::column(&[cx(0.9, 0.1)]).unwrap();
        let out = slice(&soft, &c);
        // brute-force oracle over the four points
        let best = c
            .points()
            .iter()
            .min_by(|a, b| {
                (cx(0.9, 0.1) - *a)
                    .norm_sqr()
                    .partial_cmp(&(cx(0.9, 0.1) - *b).norm_sqr())
                    .unwrap()
            })
            .unwrap();
        assert_eq!(out.symbols()[0], *best);
        assert_eq!(out.symbols()[0], cx(1.0, 0.0));
    }

    #[test]
    fn error_counting() {
        let c = Constellation::bpsk();
        let sent = symbols_from_indices(&c, &[0, 0, 1]);
        let decided = symbols_from_indices(&c, &[0, 1, 1]);
        assert_eq!(count_symbol_errors(&sent, &decided).unwrap(), 1);
        assert_eq!(count_symbol_errors(&sent, &sent).unwrap(), 0);
        let flipped = symbols_from_indices(&c, &[1, 1, 0]);
        assert_eq!(count_symbol_errors(&sent, &flipped).unwrap(), 3);
        let short = symbols_from_indices(&c, &[0]);
        assert!(count_symbol_errors(&sent, &short).is_err());
    }

    #[test]
    fn noiseless_detection_recovers_symbols() {
        let c = Constellation::bpsk();
        let mut rng = seeded_rng(30);
        for _ in 0..50 {
            let h = complex_gaussian_matrix(4, 4, 1.0, &mut rng)
                .unwrap()
                .add(&ComplexMatrix::identity(4).scale(2.0))
                .unwrap();
            let s = draw_symbols(&c, 4, &mut rng);
            let r = h.mul(&s.as_column()).unwrap();
            let decided = slice(&mmse_detect(&h, &r, 1e-12).unwrap(), &c);
            assert_eq!(count_symbol_errors(&s, &decided).unwrap(), 0);
        }
    }

    proptest! {
        #[test]
        fn slicing_is_idempotent(re in -3.0f64..3.0, im in -3.0f64..3.0, m in 1usize..=3) {
            let c = Constellation::psk(m).unwrap();
            let soft = ComplexMatrix::column(&[cx(re, im)]).unwrap();
            let once = slice(&soft, &c);
            let twice = slice(&once.as_column(), &c);
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn push_through_holds_on_random_instances(seed in 0u64..1_000) {
            let mut rng = seeded_rng(seed);
            let h = complex_gaussian_matrix(4, 2, 1.0, &mut rng).unwrap();
            let r = complex_gaussian_matrix(4, 1, 1.0, &mut rng).unwrap();
            let sigma_w2 = 0.5;
            let lhs = mmse_detect(&h, &r, sigma_w2).unwrap();
            let hh = h.hermitian();
            let mut outer = h.mul(&hh).unwrap();
            for i in 0..outer.rows() {
                outer.set(i, i, outer.get(i, i) + sigma_w2);
            }
            let rhs = hh.mul(&gauss_jordan_inverse(&outer).unwrap()).unwrap().mul(&r).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-9);
        }
    }
}
