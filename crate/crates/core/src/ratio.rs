//! Exact rational scalars. All arithmetic in the toolkit is exact; no
//! floating point appears anywhere downstream of this module.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn zero() -> Rat {
    Rat::zero()
}

pub fn one() -> Rat {
    Rat::one()
}

pub fn is_nonneg(r: &Rat) -> bool {
    !r.is_negative()
}

/// Serialize as "p/q" with the denominator always present, so outputs are
/// byte-stable regardless of whether the value is integral.
pub fn to_pq(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse "p/q" or a bare integer "p".
pub fn from_pq(s: &str) -> Result<Rat> {
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|e| Error::InvalidArgument(format!("bad rational '{s}': {e}")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::InvalidArgument(format!("zero denominator in '{s}'")));
            }
            Ok(Rat::new(parse_int(p)?, den))
        }
        None => Ok(Rat::from_integer(parse_int(s)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pq_roundtrip() {
        for (n, d) in [(1i64, 3i64), (0, 1), (-7, 4), (5, 1)] {
            let r = rat(n, d);
            assert_eq!(from_pq(&to_pq(&r)).unwrap(), r);
        }
        assert_eq!(from_pq("2").unwrap(), rat_int(2));
        assert_eq!(to_pq(&rat_int(1)), "1/1");
        assert!(from_pq("1/0").is_err());
        assert!(from_pq("x/2").is_err());
    }
}
