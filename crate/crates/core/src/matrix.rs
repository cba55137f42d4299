//! 2x2 integer matrices acting by Moebius transformations.

use std::fmt;

use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::AppComplex;

/// [[a, b], [c, d]] with 64-bit entries; products are overflow-checked.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl IntMatrix {
    pub const IDENTITY: IntMatrix = IntMatrix { a: 1, b: 0, c: 0, d: 1 };
    pub const T: IntMatrix = IntMatrix { a: 1, b: 1, c: 0, d: 1 };
    pub const S: IntMatrix = IntMatrix { a: 0, b: -1, c: 1, d: 0 };

    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        IntMatrix { a, b, c, d }
    }

    pub fn translation(k: i64) -> Self {
        IntMatrix::new(1, k, 0, 1)
    }

    pub fn det(&self) -> i128 {
        self.a as i128 * self.d as i128 - self.b as i128 * self.c as i128
    }

    pub fn mul(&self, o: &IntMatrix) -> Result<IntMatrix> {
        let f = |x: i64, y: i64, z: i64, w: i64| -> Result<i64> {
            x.checked_mul(y)
                .and_then(|p| z.checked_mul(w).and_then(|q| p.checked_add(q)))
                .ok_or(Error::Overflow("integer matrix product"))
        };
        Ok(IntMatrix {
            a: f(self.a, o.a, self.b, o.c)?,
            b: f(self.a, o.b, self.b, o.d)?,
            c: f(self.c, o.a, self.d, o.c)?,
            d: f(self.c, o.b, self.d, o.d)?,
        })
    }

    /// Adjugate; the inverse when det = 1.
    pub fn adjugate(&self) -> IntMatrix {
        IntMatrix::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix::new(-self.a, -self.b, -self.c, -self.d)
    }

    pub fn max_abs_entry(&self) -> u64 {
        [self.a, self.b, self.c, self.d]
            .iter()
            .map(|x| x.unsigned_abs())
            .max()
            .unwrap()
    }

    pub fn in_gamma0(&self, level: i64) -> bool {
        self.det() == 1 && self.c.rem_euclid(level) == 0
    }

    /// c z + d.
    pub fn automorphy(&self, z: &AppComplex) -> AppComplex {
        z.scale_i64(self.c).add_real(&Float::with_val(z.prec(), self.d))
    }

    /// (a z + b) / (c z + d).
    pub fn apply(&self, z: &AppComplex) -> Result<AppComplex> {
        let num = z.scale_i64(self.a).add_real(&Float::with_val(z.prec(), self.b));
        num.checked_div(&self.automorphy(z))
    }

    pub fn entries_integer(&self) -> [Integer; 4] {
        [
            Integer::from(self.a),
            Integer::from(self.b),
            Integer::from(self.c),
            Integer::from(self.d),
        ]
    }
}
