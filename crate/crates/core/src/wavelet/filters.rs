use super::WaveletError;

/// Orthonormal wavelet filter bank: decomposition and reconstruction
/// low/high-pass pairs of equal length.
///
/// All four filters derive from a single scaling filter `h` (the
/// reconstruction low-pass, normalized so its coefficients sum to sqrt(2)):
///
/// ```text
/// rec_lo[k] = h[k]
/// dec_lo[k] = h[L-1-k]
/// rec_hi[k] = (-1)^k * h[L-1-k]
/// dec_hi[k] = rec_hi[L-1-k]
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletFilter {
    name: String,
    lowpass_dec: Vec<f64>,
    highpass_dec: Vec<f64>,
    lowpass_rec: Vec<f64>,
    highpass_rec: Vec<f64>,
}

impl WaveletFilter {
    /// Builds the filter bank from a scaling filter. Debug builds assert the
    /// orthonormality identities; the test suite checks them for every
    /// registered name.
    fn from_scaling(name: &str, h: &[f64]) -> Self {
        let l = h.len();
        debug_assert!(l >= 2 && l % 2 == 0, "scaling filter length must be even");
        let lowpass_rec = h.to_vec();
        let lowpass_dec: Vec<f64> = h.iter().rev().copied().collect();
        let highpass_rec: Vec<f64> = (0..l)
            .map(|k| if k % 2 == 0 { h[l - 1 - k] } else { -h[l - 1 - k] })
            .collect();
        let highpass_dec: Vec<f64> = highpass_rec.iter().rev().copied().collect();
        Self {
            name: name.to_string(),
            lowpass_dec,
            highpass_dec,
            lowpass_rec,
            highpass_rec,
        }
    }

    /// Looks a filter up by name. Registered: `haar` (alias `db1`), `db2`,
    /// `db4`, `sym8`, `sym15`.
    pub fn by_name(name: &str) -> Result<Self, WaveletError> {
        let h: &[f64] = match name.to_ascii_lowercase().as_str() {
            "haar" | "db1" => &HAAR,
            "db2" => &DB2,
            "db4" => &DB4,
            "sym8" => &SYM8,
            "sym15" => &SYM15,
            _ => return Err(WaveletError::UnknownFilter(name.to_string())),
        };
        Ok(Self::from_scaling(name, h))
    }

    pub fn registered_names() -> &'static [&'static str] {
        &["haar", "db2", "db4", "sym8", "sym15"]
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.lowpass_dec.len()
    }

    pub fn lowpass_dec(&self) -> &[f64] {
        &self.lowpass_dec
    }

    pub fn highpass_dec(&self) -> &[f64] {
        &self.highpass_dec
    }

    pub fn lowpass_rec(&self) -> &[f64] {
        &self.lowpass_rec
    }

    pub fn highpass_rec(&self) -> &[f64] {
        &self.highpass_rec
    }
}

// Scaling filters, from the standard published orthonormal tables.
// Each is checked at test time against sum = sqrt(2), unit energy, the
// even-shift orthogonality relations, and perfect reconstruction.

const HAAR: [f64; 2] = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];

const DB2: [f64; 4] = [
    0.4829629131445341433748716,
    0.8365163037378079055752938,
    0.2241438680420133810259728,
    -0.1294095225512603811744494,
];

const DB4: [f64; 8] = [
    0.2303778133088965008632912,
    0.7148465705529156470899220,
    0.6308807679298589078817163,
    -0.0279837694168598542114137,
    -0.1870348117190930840795707,
    0.0308413818355607636272194,
    0.0328830116668851997354075,
    -0.0105974017850690321048832,
];

const SYM8: [f64; 16] = [
    0.0018899503327594609,
    -0.0003029205147213668,
    -0.014952258337048231,
    0.0038087520138906151,
    0.049137179673607506,
    -0.027219029917056003,
    -0.051945838107709037,
    0.3644418948353314,
    0.77718575170052351,
    0.48135965125837221,
    -0.061273359067658524,
    -0.14329423835080971,
    0.0076074873249176054,
    0.031695087811492981,
    -0.00054213233179114812,
    -0.0033824159510061256,
];

const SYM15: [f64; 30] = [
    2.8660708525318081e-5,
    2.1717890150778919e-5,
    -4.0216853760293483e-4,
    -1.0815440168545525e-4,
    3.481028737064895e-3,
    1.5261382781819983e-3,
    -1.7171252781638731e-2,
    -8.7447888864779517e-3,
    6.7969829044879179e-2,
    6.8393310060480245e-2,
    -1.3405629845625389e-1,
    -1.966263587662373e-1,
    2.439627054321663e-1,
    7.2184302963618119e-1,
    5.7864041521503451e-1,
    1.1153369514261872e-1,
    -4.108266663538248e-2,
    4.0735479696810677e-2,
    2.1937642719753955e-2,
    -3.8876716876833493e-2,
    -1.9405011430934468e-2,
    1.0079977087905669e-2,
    3.423450736351241e-3,
    -3.5901654473726417e-3,
    -2.6731644647180568e-4,
    1.0705672194623959e-3,
    5.5122547855586653e-5,
    -1.6066186637495343e-4,
    -7.3596667989194696e-6,
    9.7124197379633478e-6,
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_registered_lowpass_sums_to_sqrt2() {
        for name in WaveletFilter::registered_names() {
            let f = WaveletFilter::by_name(name).unwrap();
            let sum: f64 = f.lowpass_rec().iter().sum();
            assert!(
                (sum - std::f64::consts::SQRT_2).abs() < 1e-10,
                "{name}: lowpass sums to {sum}"
            );
            let dec_sum: f64 = f.lowpass_dec().iter().sum();
            assert!((dec_sum - std::f64::consts::SQRT_2).abs() < 1e-10);
        }
    }

    #[test]
    fn every_registered_filter_is_orthonormal() {
        for name in WaveletFilter::registered_names() {
            let f = WaveletFilter::by_name(name).unwrap();
            let h = f.lowpass_rec();
            let energy: f64 = h.iter().map(|c| c * c).sum();
            assert!((energy - 1.0).abs() < 1e-10, "{name}: energy {energy}");
            for k in 1..h.len() / 2 {
                let shift: f64 = (0..h.len() - 2 * k).map(|i| h[i] * h[i + 2 * k]).sum();
                assert!(shift.abs() < 1e-10, "{name}: shift-{k} product {shift}");
            }
        }
    }

    #[test]
    fn quadrature_mirror_relation_holds() {
        for name in WaveletFilter::registered_names() {
            let f = WaveletFilter::by_name(name).unwrap();
            let l = f.len();
            for k in 0..l {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let expected = sign * f.lowpass_rec()[l - 1 - k];
                assert!(
                    (f.highpass_rec()[k] - expected).abs() < 1e-15,
                    "{name}: rec_hi[{k}]"
                );
            }
            // Highpass coefficients of an orthonormal bank sum to zero.
            let hp_sum: f64 = f.highpass_dec().iter().sum();
            assert!(hp_sum.abs() < 1e-10, "{name}: highpass sum {hp_sum}");
        }
    }

    #[test]
    fn haar_matches_hand_values() {
        let f = WaveletFilter::by_name("haar").unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(f.lowpass_dec(), &[r, r]);
        assert_eq!(f.highpass_dec(), &[-r, r]);
        assert_eq!(f.lowpass_rec(), &[r, r]);
        assert_eq!(f.highpass_rec(), &[r, -r]);
    }

    #[test]
    fn unknown_name_is_rejected() {
        assert!(matches!(
            WaveletFilter::by_name("sym99"),
            Err(WaveletError::UnknownFilter(_))
        ));
    }

    #[test]
    fn sym15_is_30_taps() {
        assert_eq!(WaveletFilter::by_name("sym15").unwrap().len(), 30);
    }
}
