//! Fixed-step classic RK4 with a reusable workspace.

pub(crate) struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        Rk4 {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            tmp: vec![0.0; dim],
        }
    }

    /// One step of y' = f(y) (autonomous).
    pub fn step<F: FnMut(&[f64], &mut [f64])>(&mut self, f: &mut F, y: &mut [f64], h: f64) {
        let n = y.len();
        f(y, &mut self.k1);
        for i in 0..n {
            self.tmp[i] = y[i] + 0.5 * h * self.k1[i];
        }
        f(&self.tmp, &mut self.k2);
        for i in 0..n {
            self.tmp[i] = y[i] + 0.5 * h * self.k2[i];
        }
        f(&self.tmp, &mut self.k3);
        for i in 0..n {
            self.tmp[i] = y[i] + h * self.k3[i];
        }
        f(&self.tmp, &mut self.k4);
        for i in 0..n {
            y[i] += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }
}

/// Integrates over `n_out` equal output intervals of [0, t_end] with
/// `sub` RK4 steps per interval. Returns the states at the n_out + 1 output
/// times, or None if anything became non-finite.
pub(crate) fn rk4_outputs<F: FnMut(&[f64], &mut [f64])>(
    f: &mut F,
    y0: &[f64],
    t_end: f64,
    n_out: usize,
    sub: usize,
) -> Option<Vec<Vec<f64>>> {
    let h = t_end / (n_out * sub) as f64;
    let mut y = y0.to_vec();
    let mut rk = Rk4::new(y.len());
    let mut out = Vec::with_capacity(n_out + 1);
    out.push(y.clone());
    for _ in 0..n_out {
        for _ in 0..sub {
            rk.step(f, &mut y, h);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return None;
        }
        out.push(y.clone());
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_order_four() {
        let mut f = |y: &[f64], dy: &mut [f64]| dy[0] = -y[0];
        let e1 = (rk4_outputs(&mut f, &[1.0], 1.0, 1, 10).unwrap()[1][0] - (-1.0f64).exp()).abs();
        let e2 = (rk4_outputs(&mut f, &[1.0], 1.0, 1, 20).unwrap()[1][0] - (-1.0f64).exp()).abs();
        assert!(e1 / e2 > 14.0 && e1 / e2 < 18.0);
    }
}
