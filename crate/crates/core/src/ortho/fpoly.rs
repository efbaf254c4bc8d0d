use rug::Float;

/// Dense polynomial with arbitrary-precision float coefficients, ascending.
/// The small helper the pipeline uses for spectral data, Theta/Omega and the
/// Freud residuals; no canonicalization, degrees stay tiny.
#[derive(Clone, Debug)]
pub struct FPoly {
    pub c: Vec<Float>,
}

impl FPoly {
    pub fn new(c: Vec<Float>) -> FPoly {
        FPoly { c }
    }

    pub fn zero(prec: u32) -> FPoly {
        FPoly { c: vec![Float::new(prec)] }
    }

    pub fn eval(&self, x: &Float) -> Float {
        let prec = x.prec().max(self.c.first().map(|c| c.prec()).unwrap_or(53));
        let mut acc = Float::new(prec);
        for c in self.c.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn add(&self, rhs: &FPoly) -> FPoly {
        let n = self.c.len().max(rhs.c.len());
        let prec = self.prec().max(rhs.prec());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut v = Float::new(prec);
            if let Some(a) = self.c.get(i) {
                v += a;
            }
            if let Some(b) = rhs.c.get(i) {
                v += b;
            }
            out.push(v);
        }
        FPoly { c: out }
    }

    pub fn scale(&self, f: &Float) -> FPoly {
        FPoly {
            c: self.c.iter().map(|c| c.clone() * f).collect(),
        }
    }

    pub fn neg(&self) -> FPoly {
        FPoly {
            c: self.c.iter().map(|c| -c.clone()).collect(),
        }
    }

    /// self * (b0 + b1 x)
    pub fn mul_affine(&self, b0: &Float, b1: &Float) -> FPoly {
        let prec = self.prec().max(b0.prec()).max(b1.prec());
        let mut out = vec![Float::new(prec); self.c.len() + 1];
        for (i, c) in self.c.iter().enumerate() {
            out[i] += c.clone() * b0;
            out[i + 1] += c.clone() * b1;
        }
        FPoly { c: out }
    }

    pub fn max_abs_coeff(&self) -> Float {
        let prec = self.prec();
        let mut m = Float::new(prec);
        for c in &self.c {
            let a = c.clone().abs();
            if a > m {
                m = a;
            }
        }
        m
    }

    fn prec(&self) -> u32 {
        self.c.first().map(|c| c.prec()).unwrap_or(53)
    }
}
