//! Integer arithmetic coder.
//!
//! 64-bit low/high registers, carry handling via pending-bit renormalization,
//! and a two-bit termination.  Symbol probabilities enter as quantized
//! cumulative bounds on a 32-bit scale (`PROB_BITS`), so the entire coder
//! state is integer and the emitted bitstream is identical on every platform.

/// Fixed-point scale of quantized probabilities.
pub const PROB_BITS: u32 = 32;
/// One, on the probability scale.
pub const PROB_TOTAL: u64 = 1 << PROB_BITS;

const HALF: u64 = 1 << 63;
const QUARTER: u64 = 1 << 62;
const THREE_QUARTERS: u64 = HALF + QUARTER;

/// Append-only bit buffer, MSB-first within each byte.
#[derive(Debug, Clone, Default)]
pub struct BitVec {
    bytes: Vec<u8>,
    len_bits: u64,
}

impl BitVec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, bit: bool) {
        let offset = (self.len_bits % 8) as u8;
        if offset == 0 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 1 << (7 - offset);
        }
        self.len_bits += 1;
    }

    pub fn len_bits(&self) -> u64 {
        self.len_bits
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }
}

/// Reads bits MSB-first; reads past the end yield zeros (the decoder's
/// register lookahead legitimately overshoots the payload).
pub struct BitReader<'a> {
    bytes: &'a [u8],
    len_bits: u64,
    pos: u64,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8], len_bits: u64) -> Self {
        BitReader { bytes, len_bits, pos: 0 }
    }

    fn next(&mut self) -> u64 {
        if self.pos >= self.len_bits {
            self.pos += 1;
            return 0;
        }
        let byte = self.bytes[(self.pos / 8) as usize];
        let bit = (byte >> (7 - (self.pos % 8) as u8)) & 1;
        self.pos += 1;
        bit as u64
    }
}

pub struct ArithmeticEncoder {
    low: u64,
    high: u64, // inclusive upper bound
    pending: u64,
    out: BitVec,
}

impl ArithmeticEncoder {
    pub fn new() -> Self {
        ArithmeticEncoder {
            low: 0,
            high: u64::MAX,
            pending: 0,
            out: BitVec::new(),
        }
    }

    /// Narrows the interval to the symbol occupying `[cum_lo, cum_hi)` on the
    /// probability scale, then renormalizes.  Requires `cum_lo < cum_hi <= 2^32`
    /// and, between calls, interval width above a quarter — both guaranteed by
    /// the model quantizer and the renormalization loop.
    pub fn encode(&mut self, cum_lo: u64, cum_hi: u64) {
        debug_assert!(cum_lo < cum_hi && cum_hi <= PROB_TOTAL);
        let range = (self.high - self.low) as u128 + 1;
        // The -1 must stay in u128: for the top symbol the scaled bound is
        // range itself, which can be 2^64.
        self.high = self.low + ((((range * cum_hi as u128) >> PROB_BITS) - 1) as u64);
        self.low += ((range * cum_lo as u128) >> PROB_BITS) as u64;
        loop {
            if self.high < HALF {
                self.emit(false);
            } else if self.low >= HALF {
                self.emit(true);
                self.low -= HALF;
                self.high -= HALF;
            } else if self.low >= QUARTER && self.high < THREE_QUARTERS {
                self.pending += 1;
                self.low -= QUARTER;
                self.high -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
        }
    }

    fn emit(&mut self, bit: bool) {
        self.out.push(bit);
        for _ in 0..self.pending {
            self.out.push(!bit);
        }
        self.pending = 0;
    }

    /// Flushes the termination bits (two beyond any pending run) and returns
    /// the payload.
    pub fn finish(mut self) -> BitVec {
        self.pending += 1;
        let bit = self.low >= QUARTER;
        self.emit(bit);
        self.out
    }
}

pub struct ArithmeticDecoder<'a> {
    low: u64,
    high: u64,
    value: u64,
    input: BitReader<'a>,
}

impl<'a> ArithmeticDecoder<'a> {
    pub fn new(mut input: BitReader<'a>) -> Self {
        let mut value = 0u64;
        for _ in 0..64 {
            value = (value << 1) | input.next();
        }
        ArithmeticDecoder {
            low: 0,
            high: u64::MAX,
            value,
            input,
        }
    }

    /// Locates the current code point on the probability scale: the returned
    /// target t satisfies `cum_lo <= t < cum_hi` for exactly the symbol the
    /// encoder coded.  Wrapping arithmetic keeps corrupt streams from
    /// panicking; they simply decode to garbage.
    pub fn target(&self) -> u64 {
        let range = (self.high - self.low) as u128 + 1;
        let offset = self.value.wrapping_sub(self.low) as u128;
        let t = (((offset + 1) << PROB_BITS) - 1) / range;
        (t as u64).min(PROB_TOTAL - 1)
    }

    /// Mirrors `ArithmeticEncoder::encode` for the identified symbol.
    pub fn consume(&mut self, cum_lo: u64, cum_hi: u64) {
        debug_assert!(cum_lo < cum_hi && cum_hi <= PROB_TOTAL);
        let range = (self.high - self.low) as u128 + 1;
        self.high = self.low + ((((range * cum_hi as u128) >> PROB_BITS) - 1) as u64);
        self.low += ((range * cum_lo as u128) >> PROB_BITS) as u64;
        loop {
            if self.high < HALF {
                // nothing to subtract
            } else if self.low >= HALF {
                self.low -= HALF;
                self.high -= HALF;
                self.value = self.value.wrapping_sub(HALF);
            } else if self.low >= QUARTER && self.high < THREE_QUARTERS {
                self.low -= QUARTER;
                self.high -= QUARTER;
                self.value = self.value.wrapping_sub(QUARTER);
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
            self.value = (self.value << 1) | self.input.next();
        }
    }
}
