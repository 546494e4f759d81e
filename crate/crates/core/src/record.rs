//! Measurement records: per-channel increments, running Wiener sums, and the
//! pairwise Lévy areas needed by the three-channel engines.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{CoreError, Result};

/// The three pairwise Lévy areas of a three-channel record, accumulated with
/// left-point (Itô) sums.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LevyAreas {
    pub s12: f64,
    pub s23: f64,
    pub s31: f64,
}

impl LevyAreas {
    /// Antisymmetric accessor: `area(i, j) = S_ij` with 0-based channels.
    pub fn area(&self, i: usize, j: usize) -> f64 {
        match (i, j) {
            (0, 1) => self.s12,
            (1, 0) => -self.s12,
            (1, 2) => self.s23,
            (2, 1) => -self.s23,
            (2, 0) => self.s31,
            (0, 2) => -self.s31,
            _ => 0.0,
        }
    }

    /// The area complementary to channel `k` (0-based): the pair `(j, l)` with
    /// `eps_{k j l} = +1`, i.e. `k = 0 -> S_23`, `k = 1 -> S_31`, `k = 2 -> S_12`.
    pub fn complement(&self, k: usize) -> f64 {
        match k {
            0 => self.s23,
            1 => self.s31,
            _ => self.s12,
        }
    }
}

/// One Itô update of the areas from pre-step cumulative sums `w` and the new
/// increments `dw`: `S_ij += (w_i dw_j - w_j dw_i) / 2`.
pub fn levy_update(areas: &mut LevyAreas, w: [f64; 3], dw: [f64; 3]) {
    areas.s12 += 0.5 * (w[0] * dw[1] - w[1] * dw[0]);
    areas.s23 += 0.5 * (w[1] * dw[2] - w[2] * dw[1]);
    areas.s31 += 0.5 * (w[2] * dw[0] - w[0] * dw[2]);
}

/// Stored increments of one or more measurement channels on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    dt: f64,
    increments: Vec<Vec<f64>>,
    cumulative: Vec<f64>,
    levy: Option<LevyAreas>,
}

impl MeasurementRecord {
    pub fn new(dt: f64, channels: usize) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(CoreError::InvalidConfig("record dt must be positive and finite"));
        }
        if channels == 0 {
            return Err(CoreError::InvalidConfig("record needs at least one channel"));
        }
        Ok(MeasurementRecord {
            dt,
            increments: vec![Vec::new(); channels],
            cumulative: vec![0.0; channels],
            levy: None,
        })
    }

    /// Three-channel record that also accumulates Lévy areas.
    pub fn with_levy_areas(dt: f64) -> Result<Self> {
        let mut rec = Self::new(dt, 3)?;
        rec.levy = Some(LevyAreas::default());
        Ok(rec)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn channels(&self) -> usize {
        self.increments.len()
    }

    pub fn steps(&self) -> usize {
        self.increments[0].len()
    }

    /// Append one step of increments, one per channel. Lévy areas (when
    /// tracked) are updated with the pre-step cumulative sums, matching the
    /// left-point convention.
    pub fn push(&mut self, dw: &[f64]) -> Result<()> {
        if dw.len() != self.increments.len() {
            return Err(CoreError::DimensionMismatch(self.increments.len(), dw.len()));
        }
        if let Some(areas) = &mut self.levy {
            let w = [self.cumulative[0], self.cumulative[1], self.cumulative[2]];
            levy_update(areas, w, [dw[0], dw[1], dw[2]]);
        }
        for (ch, &inc) in dw.iter().enumerate() {
            self.increments[ch].push(inc);
            self.cumulative[ch] += inc;
        }
        Ok(())
    }

    /// Current cumulative sums `W_k`.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// All increments of one channel.
    pub fn channel(&self, ch: usize) -> &[f64] {
        &self.increments[ch]
    }

    pub fn levy_areas(&self) -> Option<LevyAreas> {
        self.levy
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cumulative_tracks_partial_sums() {
        let mut rec = MeasurementRecord::new(0.5, 2).unwrap();
        rec.push(&[1.0, -2.0]).unwrap();
        rec.push(&[0.25, 0.75]).unwrap();
        assert_eq!(rec.steps(), 2);
        assert_eq!(rec.cumulative(), &[1.25, -1.25]);
        assert_eq!(rec.channel(0), &[1.0, 0.25]);
    }

    #[test]
    fn levy_area_two_step_hand_sum() {
        // W starts at 0; after step 1 W = (h, 0, 0); step 2 adds (0, h, 0).
        // Left-point sum: S_12 = 0.5 * (W_1 dW_2 - W_2 dW_1) summed:
        // step 1 contributes 0 (W = 0), step 2 contributes 0.5 * h * h.
        let h = 0.3;
        let mut rec = MeasurementRecord::with_levy_areas(0.1).unwrap();
        rec.push(&[h, 0.0, 0.0]).unwrap();
        rec.push(&[0.0, h, 0.0]).unwrap();
        let areas = rec.levy_areas().unwrap();
        assert!((areas.s12 - 0.5 * h * h).abs() < 1e-15);
        assert_eq!(areas.s23, 0.0);
        // s31 picks up -0.5 * W_1 dW_3 terms; all dW_3 = 0.
        assert_eq!(areas.s31, 0.0);
    }

    #[test]
    fn antisymmetric_accessor() {
        let areas = LevyAreas { s12: 1.0, s23: 2.0, s31: 3.0 };
        assert_eq!(areas.area(0, 1), 1.0);
        assert_eq!(areas.area(1, 0), -1.0);
        assert_eq!(areas.area(2, 0), 3.0);
        assert_eq!(areas.area(0, 0), 0.0);
        assert_eq!(areas.complement(0), 2.0);
        assert_eq!(areas.complement(1), 3.0);
        assert_eq!(areas.complement(2), 1.0);
    }

    #[test]
    fn swapping_channels_flips_area_sign() {
        let mut fwd = MeasurementRecord::with_levy_areas(0.1).unwrap();
        let mut swp = MeasurementRecord::with_levy_areas(0.1).unwrap();
        let steps = [[0.4, -0.2, 0.1], [-0.3, 0.5, 0.2], [0.1, 0.1, -0.6]];
        for s in steps {
            fwd.push(&s).unwrap();
            swp.push(&[s[1], s[0], s[2]]).unwrap();
        }
        let a = fwd.levy_areas().unwrap();
        let b = swp.levy_areas().unwrap();
        assert!((a.s12 + b.s12).abs() < 1e-15);
    }
}
