//! Paillier cryptosystem with the `g = n + 1` simplification.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::RngCore;

use crate::error::{Error, Result};

/// Public half of a Paillier keypair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicKey {
    n: BigUint,
    n_squared: BigUint,
}

/// Secret half: `lambda = φ(n)`, `mu = φ(n)⁻¹ mod n`.
#[derive(Debug, Clone)]
pub struct SecretKey {
    lambda: BigUint,
    mu: BigUint,
    n: BigUint,
    n_squared: BigUint,
}

#[derive(Debug, Clone)]
pub struct Keypair {
    pub public: PublicKey,
    pub secret: SecretKey,
}

/// A Paillier ciphertext in `Z_{n²}` tagged with the fixed-point scale of
/// the plaintext it carries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ciphertext {
    pub value: BigUint,
    pub scale_exp: u32,
}

impl PublicKey {
    pub fn modulus(&self) -> &BigUint {
        &self.n
    }

    pub fn modulus_squared(&self) -> &BigUint {
        &self.n_squared
    }

    /// Encrypts a ring element `m ∈ Z_n`: `c = (1 + m·n) · rⁿ mod n²`.
    pub fn encrypt<R: RngCore>(
        &self,
        m: &BigUint,
        scale_exp: u32,
        rng: &mut R,
    ) -> Result<Ciphertext> {
        if m >= &self.n {
            return Err(Error::Input(format!(
                "plaintext has {} bits, modulus {}",
                m.bits(),
                self.n.bits()
            )));
        }
        let r = loop {
            let candidate = rng.gen_biguint_below(&self.n);
            if !candidate.is_zero() && candidate.gcd(&self.n).is_one() {
                break candidate;
            }
        };
        let g_m = (BigUint::one() + m * &self.n) % &self.n_squared;
        let r_n = r.modpow(&self.n, &self.n_squared);
        Ok(Ciphertext {
            value: (g_m * r_n) % &self.n_squared,
            scale_exp,
        })
    }

    /// Homomorphic addition: decrypts to `(m_a + m_b) mod n`.
    pub fn ct_add(&self, a: &Ciphertext, b: &Ciphertext) -> Result<Ciphertext> {
        if a.scale_exp != b.scale_exp {
            return Err(Error::Codec(format!(
                "ciphertext scale mismatch: {} vs {}",
                a.scale_exp, b.scale_exp
            )));
        }
        Ok(Ciphertext {
            value: (&a.value * &b.value) % &self.n_squared,
            scale_exp: a.scale_exp,
        })
    }

    /// Adds a plaintext ring element without fresh randomness:
    /// `c · (1 + k·n) mod n²` decrypts to `(m + k) mod n`.
    pub fn ct_add_plain(&self, a: &Ciphertext, k: &BigUint) -> Ciphertext {
        let g_k = (BigUint::one() + (k % &self.n) * &self.n) % &self.n_squared;
        Ciphertext {
            value: (&a.value * g_k) % &self.n_squared,
            scale_exp: a.scale_exp,
        }
    }

    /// Subtracts a plaintext ring element: adds `n − k`.
    pub fn ct_sub_plain(&self, a: &Ciphertext, k: &BigUint) -> Ciphertext {
        let k = k % &self.n;
        let neg = if k.is_zero() { k } else { &self.n - k };
        self.ct_add_plain(a, &neg)
    }

    /// Ciphertext-by-plaintext product: decrypts to `(m · k) mod n`.
    ///
    /// Ring elements in the upper half of `Z_n` carry small negative
    /// fixed-point values; exponentiating by `n − k` and inverting keeps the
    /// exponent as short as the underlying magnitude.
    pub fn ct_mul_plain(&self, a: &Ciphertext, k: &BigUint, k_scale: u32) -> Result<Ciphertext> {
        let k = k % &self.n;
        let scale_exp = a.scale_exp + k_scale;
        let half = &self.n >> 1;
        let value = if k > half {
            let pos = &self.n - &k;
            let powed = a.value.modpow(&pos, &self.n_squared);
            mod_inverse(&powed, &self.n_squared)
                .ok_or_else(|| Error::Crypto("ciphertext not invertible".into()))?
        } else {
            a.value.modpow(&k, &self.n_squared)
        };
        Ok(Ciphertext { value, scale_exp })
    }
}

impl SecretKey {
    /// Recovers the plaintext ring element: `L(c^λ mod n²) · µ mod n`.
    pub fn decrypt(&self, ct: &Ciphertext) -> Result<BigUint> {
        if ct.value >= self.n_squared {
            return Err(Error::Crypto("ciphertext exceeds n²".into()));
        }
        if !ct.value.gcd(&self.n_squared).is_one() {
            return Err(Error::Crypto("ciphertext shares a factor with n²".into()));
        }
        let c_lambda = ct.value.modpow(&self.lambda, &self.n_squared);
        let l = (c_lambda - BigUint::one()) / &self.n;
        Ok((l * &self.mu) % &self.n)
    }
}

/// Generates a keypair with an `bits`-bit modulus built from two primes of
/// equal length. `bits` below 512 is rejected.
pub fn keygen<R: RngCore>(bits: u64, rng: &mut R) -> Result<Keypair> {
    if bits < 512 {
        return Err(Error::Input(format!("modulus of {bits} bits is below 512")));
    }
    let prime_bits = bits / 2;
    for _ in 0..64 {
        let p = gen_prime(prime_bits, rng)?;
        let q = gen_prime(prime_bits, rng)?;
        if p == q {
            continue;
        }
        let n = &p * &q;
        if n.bits() != bits {
            continue;
        }
        let lambda = (&p - BigUint::one()) * (&q - BigUint::one());
        let Some(mu) = mod_inverse(&(&lambda % &n), &n) else {
            continue;
        };
        let n_squared = &n * &n;
        return Ok(Keypair {
            public: PublicKey {
                n: n.clone(),
                n_squared: n_squared.clone(),
            },
            secret: SecretKey {
                lambda,
                mu,
                n,
                n_squared,
            },
        });
    }
    Err(Error::Crypto("prime generation exhausted retries".into()))
}

const SMALL_PRIMES: [u32; 54] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251,
];

fn gen_prime<R: RngCore>(bits: u64, rng: &mut R) -> Result<BigUint> {
    // Top two bits set so the product of two primes has full length.
    let top = (BigUint::one() << (bits - 1)) | (BigUint::one() << (bits - 2));
    for _ in 0..100_000 {
        let mut candidate = rng.gen_biguint(bits) | &top;
        candidate.set_bit(0, true);
        if SMALL_PRIMES
            .iter()
            .any(|p| (&candidate % BigUint::from(*p)).is_zero())
        {
            continue;
        }
        if is_probable_prime(&candidate, 40, rng) {
            return Ok(candidate);
        }
    }
    Err(Error::Crypto("prime search exhausted".into()))
}

/// Miller–Rabin with random bases.
fn is_probable_prime<R: RngCore>(n: &BigUint, rounds: u32, rng: &mut R) -> bool {
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    let n_minus_one = n - &one;
    // n − 1 = d · 2^s with d odd
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    'witness: for _ in 0..rounds {
        let a = rng.gen_biguint_range(&two, &n_minus_one);
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 0..s.saturating_sub(1) {
            x = x.modpow(&two, n);
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn mod_inverse(a: &BigUint, modulus: &BigUint) -> Option<BigUint> {
    use num_bigint::BigInt;
    let a = BigInt::from(a.clone());
    let m = BigInt::from(modulus.clone());
    let ext = a.extended_gcd(&m);
    if !ext.gcd.is_one() {
        return None;
    }
    let mut x = ext.x % &m;
    if x < BigInt::zero() {
        x += &m;
    }
    x.to_biguint()
}
