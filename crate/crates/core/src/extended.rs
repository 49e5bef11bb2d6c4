use std::fmt;

/// A real number or one of the two infinities.
///
/// Reciprocals follow the conventions `1/0 = +inf` and `-1/0 = -inf`, so the
/// sign of a zero argument is taken from the numerator, not from the zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    NegInfinity,
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    /// Maps IEEE infinities onto the corresponding variants. NaN is rejected.
    pub fn from_f64(value: f64) -> Option<Self> {
        if value.is_nan() {
            None
        } else if value == f64::INFINITY {
            Some(ExtendedReal::PosInfinity)
        } else if value == f64::NEG_INFINITY {
            Some(ExtendedReal::NegInfinity)
        } else {
            Some(ExtendedReal::Finite(value))
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::NegInfinity => f64::NEG_INFINITY,
            ExtendedReal::Finite(v) => v,
            ExtendedReal::PosInfinity => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// `numerator / self` with `c/0 = sign(c)·inf` and `c/inf = 0`.
    pub fn div_into(self, numerator: f64) -> ExtendedReal {
        match self {
            ExtendedReal::Finite(0.0) => {
                if numerator > 0.0 {
                    ExtendedReal::PosInfinity
                } else if numerator < 0.0 {
                    ExtendedReal::NegInfinity
                } else {
                    ExtendedReal::Finite(f64::NAN)
                }
            }
            ExtendedReal::Finite(v) => ExtendedReal::Finite(numerator / v),
            _ => ExtendedReal::Finite(0.0),
        }
    }

    /// `1/self` under the same conventions.
    pub fn recip(self) -> ExtendedReal {
        self.div_into(1.0)
    }

    /// `(self - shift) / scale` for a nonzero finite scale.
    pub fn affine(self, shift: f64, scale: f64) -> ExtendedReal {
        match self {
            ExtendedReal::Finite(v) => ExtendedReal::Finite((v - shift) / scale),
            inf => {
                if scale > 0.0 {
                    inf
                } else {
                    -inf
                }
            }
        }
    }
}

impl From<f64> for ExtendedReal {
    fn from(value: f64) -> Self {
        ExtendedReal::from_f64(value).expect("NaN is not an extended real")
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::NegInfinity => write!(f, "-inf"),
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::PosInfinity => write!(f, "inf"),
        }
    }
}

impl std::ops::Neg for ExtendedReal {
    type Output = ExtendedReal;

    fn neg(self) -> ExtendedReal {
        match self {
            ExtendedReal::NegInfinity => ExtendedReal::PosInfinity,
            ExtendedReal::Finite(v) => ExtendedReal::Finite(-v),
            ExtendedReal::PosInfinity => ExtendedReal::NegInfinity,
        }
    }
}
