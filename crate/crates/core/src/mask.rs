//! Bit-packed binary pixel mask, one `u64` word per 64 columns.

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PixelMask {
    width: usize,
    height: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

/// Half-open run `[start, end)` of equal pixels in one row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Run {
    pub row: u32,
    pub start: u32,
    pub end: u32,
}

impl Run {
    pub fn len(&self) -> usize {
        (self.end - self.start) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

impl PixelMask {
    pub fn new(width: usize, height: usize) -> Self {
        let words_per_row = width.div_ceil(64);
        Self { width, height, words_per_row, bits: vec![0; words_per_row * height] }
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut m = Self::new(width, height);
        for y in 0..height {
            for x in 0..width {
                if f(x, y) {
                    m.set(x, y);
                }
            }
        }
        m
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.words_per_row + x / 64] >> (x % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize) {
        self.bits[y * self.words_per_row + x / 64] |= 1 << (x % 64);
    }

    #[inline]
    pub fn clear(&mut self, x: usize, y: usize) {
        self.bits[y * self.words_per_row + x / 64] &= !(1 << (x % 64));
    }

    /// Sets every pixel of `[start, end)` in row `y`.
    pub fn set_span(&mut self, y: usize, start: usize, end: usize) {
        let base = y * self.words_per_row;
        let mut x = start;
        while x < end {
            let w = x / 64;
            let lo = x % 64;
            let hi = (end - w * 64).min(64);
            let span = if hi - lo == 64 { u64::MAX } else { ((1u64 << (hi - lo)) - 1) << lo };
            self.bits[base + w] |= span;
            x = w * 64 + hi;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn row(&self, y: usize) -> &[u64] {
        &self.bits[y * self.words_per_row..(y + 1) * self.words_per_row]
    }

    fn tail_mask(&self) -> u64 {
        match self.width % 64 {
            0 => u64::MAX,
            r => (1u64 << r) - 1,
        }
    }

    /// Row `y` with `value` pixels as ones, tail bits cleared.
    #[inline]
    fn row_word(&self, y: usize, w: usize, value: bool) -> u64 {
        let raw = self.bits[y * self.words_per_row + w];
        let v = if value { raw } else { !raw };
        if w + 1 == self.words_per_row {
            v & self.tail_mask()
        } else {
            v
        }
    }

    /// Appends the maximal runs of `value` pixels in row `y`.
    pub fn runs_in_row(&self, y: usize, value: bool, out: &mut Vec<Run>) {
        let mut open: Option<u32> = None;
        for w in 0..self.words_per_row {
            let word = self.row_word(y, w, value);
            let base = (w * 64) as u32;
            let mut pos = 0u32;
            while pos < 64 {
                let rest = word >> pos;
                if let Some(start) = open {
                    let ones = (!rest).trailing_zeros();
                    if pos + ones < 64 {
                        out.push(Run { row: y as u32, start, end: base + pos + ones });
                        open = None;
                    }
                    pos += ones;
                } else {
                    if rest == 0 {
                        break;
                    }
                    pos += rest.trailing_zeros();
                    open = Some(base + pos);
                }
            }
        }
        if let Some(start) = open {
            out.push(Run { row: y as u32, start, end: self.width as u32 });
        }
    }

    pub fn or_assign(&mut self, other: &PixelMask) {
        debug_assert_eq!(self.bits.len(), other.bits.len());
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= *b;
        }
    }

    /// Number of pixel edges between set pixels and unset pixels or the map border.
    pub fn perimeter_edges(&self) -> usize {
        let mut runs = Vec::new();
        let mut vertical = 0usize;
        let mut horizontal = 0usize;
        for y in 0..self.height {
            runs.clear();
            self.runs_in_row(y, true, &mut runs);
            vertical += 2 * runs.len();
            for w in 0..self.words_per_row {
                let cur = self.row_word(y, w, true);
                let above = if y > 0 { self.row_word(y - 1, w, true) } else { 0 };
                let below = if y + 1 < self.height { self.row_word(y + 1, w, true) } else { 0 };
                horizontal += (cur & !above).count_ones() as usize + (cur & !below).count_ones() as usize;
            }
        }
        vertical + horizontal
    }
}
