//! Packed binary matrices: n rows of `cols` bits in ceil(cols/64) words
//! per row, little-endian within each word (bit j of a row lives in word
//! j/64 at position j%64). Padding bits beyond `cols` are always zero.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64);
        BitMatrix {
            rows,
            cols,
            words_per_row,
            words: vec![0; rows * words_per_row],
        }
    }

    /// Build from raw words, checking the padding invariant.
    pub fn from_words(rows: usize, cols: usize, words: Vec<u64>) -> Result<Self> {
        let words_per_row = cols.div_ceil(64);
        if words.len() != rows * words_per_row {
            return Err(Error::Dimension {
                context: "bit matrix word count",
                expected: rows * words_per_row,
                actual: words.len(),
            });
        }
        let m = BitMatrix {
            rows,
            cols,
            words_per_row,
            words,
        };
        if let Some(row) = (0..rows).find(|&i| !m.padding_clear(i)) {
            return Err(Error::InvalidArgument(format!(
                "row {row} has nonzero padding bits beyond column {cols}"
            )));
        }
        Ok(m)
    }

    fn padding_clear(&self, row: usize) -> bool {
        let tail_bits = self.cols % 64;
        if tail_bits == 0 || self.words_per_row == 0 {
            return true;
        }
        let last = self.row_words(row)[self.words_per_row - 1];
        last & !((1u64 << tail_bits) - 1) == 0
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn words_per_row(&self) -> usize {
        self.words_per_row
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn row_words(&self, row: usize) -> &[u64] {
        &self.words[row * self.words_per_row..(row + 1) * self.words_per_row]
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        let w = self.words[row * self.words_per_row + col / 64];
        (w >> (col % 64)) & 1 == 1
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        let idx = row * self.words_per_row + col / 64;
        let mask = 1u64 << (col % 64);
        if value {
            self.words[idx] |= mask;
        } else {
            self.words[idx] &= !mask;
        }
    }

    pub fn count_ones_in_row(&self, row: usize) -> u32 {
        self.row_words(row).iter().map(|w| w.count_ones()).sum()
    }

    pub fn count_ones_in_col(&self, col: usize) -> usize {
        (0..self.rows).filter(|&i| self.get(i, col)).count()
    }

    /// Do two rows share at least one set bit?
    pub fn rows_intersect(&self, a: usize, b: usize) -> bool {
        self.row_words(a)
            .iter()
            .zip(self.row_words(b))
            .any(|(x, y)| x & y != 0)
    }
}

/// Hamming distance between two packed codes: popcount of the XOR.
pub fn hamming(a: &[u64], b: &[u64]) -> Result<u32> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            context: "hamming operand word counts",
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x ^ y).count_ones())
        .sum())
}
