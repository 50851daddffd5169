//! Square Gray-mapped QAM.
//!
//! A label with `2m` bits puts its first `m` bits on the in-phase axis and the
//! last `m` on the quadrature axis. Along each axis the levels, from most
//! negative to most positive, carry the reflected Gray sequence; for 16-QAM
//! that is `00, 01, 11, 10` on levels `-3, -1, +1, +3` (times `sqrt(Es/10)`).
//! The full 16-QAM table is in `docs/qam16_gray.md`.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    /// Point for each label, indexed by the label's integer value (MSB first).
    points: Vec<Complex64>,
    bits_per_symbol: usize,
    /// Amplitude of each level along one axis, most negative first.
    axis_levels: Vec<f64>,
    /// Gray label of each axis level.
    axis_labels: Vec<u32>,
    es: f64,
}

impl Constellation {
    /// Square QAM with `2^bits_per_axis` levels per axis and average energy `es`.
    pub fn square_qam(bits_per_axis: usize, es: f64) -> Result<Self> {
        if bits_per_axis == 0 || bits_per_axis > 8 {
            return Err(Error::InvalidParameter(format!("unsupported bits per axis {bits_per_axis}")));
        }
        if !(es > 0.0 && es.is_finite()) {
            return Err(Error::InvalidParameter(format!("Es must be positive (got {es})")));
        }
        let m = 1usize << bits_per_axis;
        // Mean of (2k - (m-1))² over k is (m² - 1)/3; two axes double it.
        let scale = (es / (2.0 * (m * m - 1) as f64 / 3.0)).sqrt();
        let axis_levels: Vec<f64> = (0..m).map(|k| (2.0 * k as f64 - (m as f64 - 1.0)) * scale).collect();
        let axis_labels: Vec<u32> = (0..m as u32).map(|k| k ^ (k >> 1)).collect();

        let mut level_of_label = vec![0usize; m];
        for (k, &g) in axis_labels.iter().enumerate() {
            level_of_label[g as usize] = k;
        }
        let points = (0..m * m)
            .map(|label| {
                let (i_bits, q_bits) = (label >> bits_per_axis, label & (m - 1));
                Complex64::new(axis_levels[level_of_label[i_bits]], axis_levels[level_of_label[q_bits]])
            })
            .collect();
        Ok(Constellation {
            points,
            bits_per_symbol: 2 * bits_per_axis,
            axis_levels,
            axis_labels,
            es,
        })
    }

    pub fn qam16(es: f64) -> Result<Self> {
        Self::square_qam(2, es)
    }

    pub fn qpsk(es: f64) -> Result<Self> {
        Self::square_qam(1, es)
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn es(&self) -> f64 {
        self.es
    }

    pub fn point(&self, label: usize) -> Complex64 {
        self.points[label]
    }

    /// Nearest level on one axis; ties go to the smaller magnitude.
    fn slice_axis(&self, x: f64) -> u32 {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (k, &lvl) in self.axis_levels.iter().enumerate() {
            let d = (x - lvl).abs();
            if d < best_d || (d == best_d && lvl.abs() < self.axis_levels[best].abs()) {
                best = k;
                best_d = d;
            }
        }
        self.axis_labels[best]
    }

    /// Hard decision label for one received symbol.
    pub fn decide(&self, z: Complex64) -> usize {
        let half = self.bits_per_symbol / 2;
        ((self.slice_axis(z.re) as usize) << half) | self.slice_axis(z.im) as usize
    }
}

/// Map a bit sequence (one `0`/`1` per element, MSB first per symbol) to symbols.
pub fn modulate(bits: &[u8], q: &Constellation) -> Result<Vec<Complex64>> {
    let n = q.bits_per_symbol;
    if !bits.len().is_multiple_of(n) {
        return Err(Error::BitLength {
            bits: bits.len(),
            per_symbol: n,
        });
    }
    Ok(bits
        .chunks(n)
        .map(|chunk| q.point(chunk.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize)))
        .collect())
}

pub fn demodulate(s_hat: &[Complex64], q: &Constellation) -> Vec<u8> {
    let n = q.bits_per_symbol;
    let mut out = Vec::with_capacity(s_hat.len() * n);
    for &z in s_hat {
        let label = q.decide(z);
        out.extend((0..n).rev().map(|i| ((label >> i) & 1) as u8));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_table_matches() {
        let doc = include_str!("../../../../docs/qam16_gray.md");
        let q = Constellation::qam16(10.0).unwrap();
        let mut rows = 0;
        for line in doc.lines().filter(|l| l.starts_with("| ") && l.contains('`')) {
            let f: Vec<&str> = line.split('|').map(str::trim).collect();
            let label: usize = f[1].parse().unwrap();
            assert_eq!(f[2].trim_matches('`'), format!("{label:04b}"));
            let i: f64 = f[3].parse().unwrap();
            let qv: f64 = f[4].parse().unwrap();
            assert_eq!(q.point(label), Complex64::new(i, qv), "label {label}");
            rows += 1;
        }
        assert_eq!(rows, 16);
    }

    #[test]
    fn qam16_points_and_energy() {
        let q = Constellation::qam16(1.0).unwrap();
        let s = 10f64.sqrt();
        for p in q.points() {
            for v in [p.re * s, p.im * s] {
                let r = v.round();
                assert!((v - r).abs() < 1e-12 && [-3.0, -1.0, 1.0, 3.0].contains(&r));
            }
        }
        let mean: f64 = q.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / 16.0;
        assert!((mean - 1.0).abs() < 1e-14);
        let q2 = Constellation::qam16(2.5).unwrap();
        let mean: f64 = q2.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / 16.0;
        assert!((mean - 2.5).abs() < 1e-13);
    }

    #[test]
    fn all_zero_label_is_corner() {
        let q = Constellation::qam16(1.0).unwrap();
        let s = modulate(&[0, 0, 0, 0], &q).unwrap();
        let expect = Complex64::new(-3.0, -3.0) / 10f64.sqrt();
        assert!((s[0] - expect).norm() < 1e-15);
        assert!((s[0].norm_sqr() - 1.8).abs() < 1e-14);
    }

    #[test]
    fn round_trip_every_label() {
        for q in [Constellation::qam16(1.0).unwrap(), Constellation::qpsk(1.0).unwrap()] {
            let n = q.bits_per_symbol();
            for label in 0..(1usize << n) {
                let bits: Vec<u8> = (0..n).rev().map(|i| ((label >> i) & 1) as u8).collect();
                let s = modulate(&bits, &q).unwrap();
                assert_eq!(demodulate(&s, &q), bits);
            }
        }
    }

    #[test]
    fn gray_neighbors_differ_in_one_bit() {
        let q = Constellation::qam16(1.0).unwrap();
        for a in 0..16usize {
            for b in 0..16usize {
                let d = q.point(a) - q.point(b);
                let step = 2.0 / 10f64.sqrt();
                let adjacent = ((d.re.abs() - step).abs() < 1e-12 && d.im.abs() < 1e-12)
                    || ((d.im.abs() - step).abs() < 1e-12 && d.re.abs() < 1e-12);
                if adjacent {
                    assert_eq!((a ^ b).count_ones(), 1, "labels {a:04b} {b:04b}");
                }
            }
        }
    }

    #[test]
    fn ties_go_to_smaller_magnitude() {
        // Es = 10 puts the levels exactly on -3, -1, 1, 3.
        let q = Constellation::qam16(10.0).unwrap();
        // Equidistant from ±1 with equal magnitudes: the negative level wins.
        assert_eq!(q.slice_axis(0.0), 0b01);
        assert_eq!(q.slice_axis(2.0), 0b11);
        assert_eq!(q.slice_axis(-2.0), 0b01);
        assert_eq!(q.slice_axis(2.5), 0b10);
    }

    #[test]
    fn length_mismatch() {
        let q = Constellation::qam16(1.0).unwrap();
        assert!(matches!(modulate(&[1, 0, 1], &q), Err(Error::BitLength { bits: 3, per_symbol: 4 })));
    }
}
