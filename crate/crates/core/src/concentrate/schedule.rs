use serde::Serialize;

use crate::formula::ClassParams;
use crate::util::ceil_log2;

/// ⌈h · log₂ x⌉, exact whenever x^h fits in 128 bits.
fn ceil_h_log2(h: usize, x: u128) -> u128 {
    match u32::try_from(h).ok().and_then(|h| x.checked_pow(h)) {
        Some(p) => ceil_log2(p) as u128,
        None => (h as f64 * (x as f64).log2()).ceil() as u128,
    }
}

/// Concentration targets ℓ_h per layer. `values[h]` is ℓ_h; for odd depth
/// the list also holds ℓ_H = 2, for even depth it stops at ℓ_{H-1}.
/// Values saturate at u128::MAX.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EllSchedule {
    pub height: usize,
    pub k: usize,
    pub lambda: usize,
    pub depth: usize,
    /// 2⌈H log₂ k⌉ + 1, the block-support target of one induction step.
    pub ell: u128,
    pub values: Vec<u128>,
}

impl EllSchedule {
    pub fn new(height: usize, k: usize, lambda: usize, depth: usize) -> Self {
        assert!(
            height >= 1 && k >= 1 && lambda >= 1,
            "schedule needs positive parameters"
        );
        let hk = ceil_h_log2(height, k as u128);
        let ell = 2 * hk + 1;
        let base = (2 * height as u128).saturating_mul(hk);
        let odd = depth % 2 == 1;
        let mut values = Vec::with_capacity(height + 1);
        for h in 0..height {
            let v = if odd {
                base.saturating_pow((height - h) as u32)
            } else {
                let top = 2 * ceil_h_log2(height, (k as u128).saturating_mul(lambda as u128));
                base.saturating_pow((height - h - 1) as u32)
                    .saturating_mul(top)
            };
            values.push(v.saturating_add(1));
        }
        if odd {
            values.push(2);
        }
        EllSchedule {
            height,
            k,
            lambda,
            depth,
            ell,
            values,
        }
    }

    pub fn get(&self, h: usize) -> Option<u128> {
        self.values.get(h).copied()
    }

    /// ℓ₀, the support bound used by the hitting set.
    pub fn ell0(&self) -> u128 {
        self.values[0]
    }

    /// Layers h for which ℓ_h = (ℓ_{h+1} − 1)·H·(ℓ − 1) + 1 is claimed:
    /// h < H − 1, plus h = H − 1 when the depth is odd.
    pub fn recurrence_layers(&self) -> Vec<usize> {
        (0..self.values.len().saturating_sub(1))
            .filter(|&h| h + 1 < self.height || self.depth % 2 == 1)
            .collect()
    }

    /// Checks the recurrence as an exact integer identity on every layer
    /// where no value saturated.
    pub fn recurrence_holds(&self) -> bool {
        self.recurrence_layers().into_iter().all(|h| {
            let next = self.values[h + 1];
            let rhs = (next - 1)
                .checked_mul(self.height as u128)
                .and_then(|v| v.checked_mul(self.ell - 1))
                .and_then(|v| v.checked_add(1));
            match rhs {
                Some(r) => r == self.values[h],
                None => self.values[h] == u128::MAX,
            }
        })
    }
}

pub fn ell_schedule(params: &ClassParams) -> EllSchedule {
    EllSchedule::new(params.height, params.k, params.lambda, params.depth)
}
