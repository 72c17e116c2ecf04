//! Dormand–Prince 5(4) with adaptive step size.

pub type State = [f64; 3];

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..3 {
            out[i] += h * c * k[i];
        }
    }
    out
}

pub struct Dopri5<F: Fn(&State) -> State> {
    f: F,
    pub rtol: f64,
    pub atol: [f64; 3],
    pub h: f64,
    pub h_max: f64,
    k1: Option<State>,
}

pub enum StepResult {
    Accepted(State),
    /// Step size underflow.
    Stalled,
}

impl<F: Fn(&State) -> State> Dopri5<F> {
    pub fn new(f: F, rtol: f64, atol: [f64; 3], h0: f64) -> Self {
        Self { f, rtol, atol, h: h0, h_max: f64::INFINITY, k1: None }
    }

    /// Advances `y` by one accepted step (retrying rejected ones).
    pub fn step(&mut self, y: &State) -> StepResult {
        let k1 = match self.k1 {
            Some(k) => k,
            None => (self.f)(y),
        };
        for _ in 0..60 {
            let h = self.h.min(self.h_max);
            let k2 = (self.f)(&axpy(y, &[(A21, &k1)], h));
            let k3 = (self.f)(&axpy(y, &[(A31, &k1), (A32, &k2)], h));
            let k4 = (self.f)(&axpy(y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
            let k5 = (self.f)(&axpy(y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h));
            let k6 = (self.f)(&axpy(y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h));
            let y5 = axpy(y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
            let k7 = (self.f)(&y5);
            let mut err: f64 = 0.0;
            for i in 0..3 {
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.atol[i] + self.rtol * y[i].abs().max(y5[i].abs());
                err = err.max((e / sc).abs());
            }
            if !err.is_finite() {
                self.h = h * 0.2;
                continue;
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                self.h = h * fac;
                self.k1 = Some(k7);
                return StepResult::Accepted(y5);
            }
            self.h = h * fac.min(1.0);
            if self.h < 1e-300 {
                break;
            }
        }
        StepResult::Stalled
    }
}
