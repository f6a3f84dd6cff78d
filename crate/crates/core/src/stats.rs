//! Descriptive statistics and the Jarque-Bera normality test.

use serde::{Deserialize, Serialize};

use crate::data::ReturnSeries;
use crate::error::{Error, Result};

/// Summary of one return series.
///
/// Skewness and kurtosis use divide-by-n central moments; kurtosis is not
/// excess kurtosis. `std_dev` uses the n - 1 divisor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveStats {
    pub mean: f64,
    pub median: f64,
    pub maximum: f64,
    pub minimum: f64,
    pub std_dev: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub jarque_bera: f64,
    pub jb_p_value: f64,
    pub n: usize,
}

/// Row labels in the order they are written to CSV.
pub const ROW_LABELS: [&str; 9] = [
    "Mean",
    "Median",
    "Maximum",
    "Minimum",
    "Std. Dev.",
    "Skewness",
    "Kurtosis",
    "Jarque-Bera",
    "Probability",
];

impl DescriptiveStats {
    pub fn rows(&self) -> [f64; 9] {
        [
            self.mean,
            self.median,
            self.maximum,
            self.minimum,
            self.std_dev,
            self.skewness,
            self.kurtosis,
            self.jarque_bera,
            self.jb_p_value,
        ]
    }
}

/// JB = n/6 * (S^2 + (K - 3)^2 / 4).
pub fn jarque_bera(n: usize, skewness: f64, kurtosis: f64) -> f64 {
    n as f64 / 6.0 * (skewness * skewness + (kurtosis - 3.0).powi(2) / 4.0)
}

/// Upper tail of the chi-square distribution with two degrees of freedom.
pub fn chi2_2_sf(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        (-x / 2.0).exp()
    }
}

pub fn describe(series: &ReturnSeries) -> Result<DescriptiveStats> {
    describe_values(&series.values)
}

pub fn describe_values(values: &[f64]) -> Result<DescriptiveStats> {
    let n = values.len();
    if n < 4 {
        return Err(Error::TooShort { needed: 4, got: n });
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let ss = m2;
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    if !(m2 > 0.0) {
        return Err(Error::ZeroVariance(
            "skewness and kurtosis are undefined for a constant series".into(),
        ));
    }
    let skewness = m3 / m2.powf(1.5);
    let kurtosis = m4 / (m2 * m2);

    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };

    let jb = jarque_bera(n, skewness, kurtosis);
    Ok(DescriptiveStats {
        mean,
        median,
        maximum: sorted[n - 1],
        minimum: sorted[0],
        std_dev: (ss / (nf - 1.0)).sqrt(),
        skewness,
        kurtosis,
        jarque_bera: jb,
        jb_p_value: chi2_2_sf(jb),
        n,
    })
}

/// Writes a Table-1 style block: one row per statistic, one column per market.
pub fn write_stats_csv<W: std::io::Write>(
    writer: W,
    markets: &[String],
    stats: &[DescriptiveStats],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["statistic".to_string()];
    header.extend(markets.iter().cloned());
    w.write_record(&header)?;
    for (row, label) in ROW_LABELS.iter().enumerate() {
        let mut record = vec![label.to_string()];
        record.extend(stats.iter().map(|s| format!("{:.6}", s.rows()[row])));
        w.write_record(&record)?;
    }
    w.write_record(
        std::iter::once("Observations".to_string()).chain(stats.iter().map(|s| s.n.to_string())),
    )?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gaussian_moments_give_zero_jb() {
        assert_eq!(jarque_bera(500, 0.0, 3.0), 0.0);
        assert_eq!(chi2_2_sf(0.0), 1.0);
    }

    #[test]
    fn jb_from_printed_moments() {
        let qatar = jarque_bera(428, 0.244617, 4.225992);
        assert!((qatar - 31.07290).abs() / 31.07290 < 0.005);
        let egypt = jarque_bera(428, -0.400171, 5.448237);
        assert!((egypt - 118.3137).abs() / 118.3137 < 0.005);
    }

    #[test]
    fn symmetric_sample() {
        let s = describe_values(&[-2.0, -1.0, 0.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.mean, 0.0);
        assert_eq!(s.median, 0.0);
        assert_eq!(s.skewness, 0.0);
        // m2 = 2, m4 = 34/5 -> K = 1.7
        assert!((s.kurtosis - 1.7).abs() < 1e-12);
        assert!((s.std_dev - 2.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(s.maximum, 2.0);
        assert_eq!(s.minimum, -2.0);
    }

    #[test]
    fn even_length_median() {
        let s = describe_values(&[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(s.median, 2.5);
    }

    #[test]
    fn rejects_short_and_constant() {
        assert!(matches!(
            describe_values(&[1.0, 2.0, 3.0]),
            Err(Error::TooShort { needed: 4, got: 3 })
        ));
        assert!(matches!(
            describe_values(&[1.0; 10]),
            Err(Error::ZeroVariance(_))
        ));
    }

    #[test]
    fn csv_has_table_row_order() {
        let s = describe_values(&[0.1, -0.2, 0.3, 0.05, -0.1]).unwrap();
        let mut buf = Vec::new();
        write_stats_csv(&mut buf, &["x".into()], &[s]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let labels: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
        assert_eq!(&labels[..9], &ROW_LABELS);
    }

    proptest! {
        #[test]
        fn shift_only_moves_location(
            values in prop::collection::vec(-5.0f64..5.0, 8..60),
            shift in -100.0f64..100.0,
        ) {
            let base = describe_values(&values);
            prop_assume!(base.is_ok());
            let base = base.unwrap();
            prop_assume!(base.std_dev > 1e-3);
            let shifted: Vec<f64> = values.iter().map(|v| v + shift).collect();
            let s = describe_values(&shifted).unwrap();
            prop_assert!((s.mean - base.mean - shift).abs() < 1e-9);
            prop_assert!((s.median - base.median - shift).abs() < 1e-9);
            prop_assert!((s.maximum - base.maximum - shift).abs() < 1e-9);
            prop_assert!((s.minimum - base.minimum - shift).abs() < 1e-9);
            prop_assert!((s.skewness - base.skewness).abs() < 1e-10);
            prop_assert!((s.kurtosis - base.kurtosis).abs() < 1e-10);
            prop_assert!((s.jarque_bera - base.jarque_bera).abs() < 1e-10 * base.jarque_bera.max(1.0));
            prop_assert!(s.minimum <= s.median && s.median <= s.maximum);
            prop_assert!(s.jb_p_value >= 0.0 && s.jb_p_value <= 1.0);
        }
    }
}
