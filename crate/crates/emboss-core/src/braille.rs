//! Grade 1 (uncontracted) braille translation.
//!
//! A [`BrailleCell`] is a 6-bit dot mask using standard numbering: dots 1-3
//! run down the left column, dots 4-6 down the right, and bit `i-1` is set
//! when dot `i` is raised. The head embosses one vertical column at a time,
//! so cells are split into two [`ColumnPattern`]s (bit 0 = top row).
//!
//! The [`TranslationTable`] is data, not code: the default English table is
//! embedded as text in the same one-line-per-mapping format accepted from
//! external files, so locales can be swapped without touching the encoder.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// First codepoint of the Unicode braille patterns block.
const UNICODE_BRAILLE_BASE: u32 = 0x2800;

/// Capital-sign prefix (dot 6), emitted before each uppercase letter.
pub const CAPITAL_SIGN: BrailleCell = BrailleCell(0b100000);
/// Number-sign prefix (dots 3,4,5,6), emitted before each maximal digit run.
pub const NUMBER_SIGN: BrailleCell = BrailleCell(0b111100);
/// Letter-sign prefix (dots 5,6), terminates a digit run before a-j letters.
pub const LETTER_SIGN: BrailleCell = BrailleCell(0b110000);

/// Default English Grade 1 table, in the external file format.
const DEFAULT_TABLE: &str = "\
a\t1
b\t12
c\t14
d\t145
e\t15
f\t124
g\t1245
h\t125
i\t24
j\t245
k\t13
l\t123
m\t134
n\t1345
o\t135
p\t1234
q\t12345
r\t1235
s\t234
t\t2345
u\t136
v\t1236
w\t2456
x\t1346
y\t13456
z\t1356
1\t1
2\t12
3\t14
4\t145
5\t15
6\t124
7\t1245
8\t125
9\t24
0\t245
 \t0
.\t256
,\t2
?\t236
'\t3
-\t36
";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BrailleError {
    #[error("unsupported character {ch:?} at position {position}")]
    UnsupportedCharacter { position: usize, ch: char },
    #[error("cell sequence at index {index} matches no table entry")]
    UndecodableSequence { index: usize },
    #[error("cell mask {0} out of range (0..=63)")]
    InvalidMask(u8),
    #[error("dot number {0} out of range (1..=6)")]
    InvalidDot(u8),
    #[error("table line {line}: {message}")]
    InvalidTable { line: usize, message: String },
}

/// One six-dot braille cell as a dot mask in `0..=63`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BrailleCell(u8);

impl BrailleCell {
    pub const BLANK: BrailleCell = BrailleCell(0);

    pub fn from_mask(mask: u8) -> Result<Self, BrailleError> {
        if mask > 63 {
            return Err(BrailleError::InvalidMask(mask));
        }
        Ok(BrailleCell(mask))
    }

    /// Builds a cell from dot numbers 1..=6. Duplicates are harmless.
    pub fn from_dots(dots: &[u8]) -> Result<Self, BrailleError> {
        let mut mask = 0u8;
        for &d in dots {
            if !(1..=6).contains(&d) {
                return Err(BrailleError::InvalidDot(d));
            }
            mask |= 1 << (d - 1);
        }
        Ok(BrailleCell(mask))
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    pub fn is_blank(self) -> bool {
        self.0 == 0
    }

    /// Raised dot numbers in ascending order.
    pub fn dots(self) -> Vec<u8> {
        (1..=6).filter(|d| self.0 & (1 << (d - 1)) != 0).collect()
    }

    /// Splits into (left, right) columns: dots 1,2,3 and 4,5,6, top first.
    pub fn columns(self) -> (ColumnPattern, ColumnPattern) {
        (
            ColumnPattern(self.0 & 0b111),
            ColumnPattern((self.0 >> 3) & 0b111),
        )
    }

    /// Reassembles a cell from its two columns; inverse of [`Self::columns`].
    pub fn from_columns(left: ColumnPattern, right: ColumnPattern) -> Self {
        BrailleCell(left.0 | (right.0 << 3))
    }

    /// Unicode braille pattern for this cell: `U+2800 + mask`.
    pub fn unicode(self) -> char {
        // Masks are <= 63, always inside the braille patterns block.
        char::from_u32(UNICODE_BRAILLE_BASE + u32::from(self.0)).unwrap()
    }
}

impl fmt::Display for BrailleCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.unicode())
    }
}

/// One vertical half of a cell: bit 0 = top row, bit 1 = middle, bit 2 = bottom.
///
/// Row bits double as cam indices: cam 0 drives the top pin, cam 1 the middle,
/// cam 2 the bottom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColumnPattern(u8);

impl ColumnPattern {
    pub const BLANK: ColumnPattern = ColumnPattern(0);

    pub fn from_mask(mask: u8) -> Result<Self, BrailleError> {
        if mask > 7 {
            return Err(BrailleError::InvalidMask(mask));
        }
        Ok(ColumnPattern(mask))
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    pub fn is_blank(self) -> bool {
        self.0 == 0
    }

    pub fn has_row(self, row: usize) -> bool {
        row < 3 && self.0 & (1 << row) != 0
    }

    /// Cam indices (= row indices) this column requires, ascending.
    pub fn cams(self) -> Vec<usize> {
        (0..3).filter(|r| self.has_row(*r)).collect()
    }
}

/// Character-to-cells mapping plus the decode state machine for Grade 1 rules.
///
/// Digits share cells with letters a-j; the encoder prefixes each maximal
/// digit run with the number sign and re-inserts a letter sign when a digit
/// run is immediately followed by a letter that would otherwise read as a
/// digit. Uppercase letters are lowered and prefixed with the capital sign.
#[derive(Debug, Clone)]
pub struct TranslationTable {
    entries: BTreeMap<char, Vec<BrailleCell>>,
    /// Single-cell reverse map for non-digit entries.
    decode_single: BTreeMap<BrailleCell, char>,
    /// Cell -> digit map, consulted only in number mode.
    decode_digit: BTreeMap<BrailleCell, char>,
    /// Multi-cell entries, longest first, for greedy decoding.
    decode_multi: Vec<(Vec<BrailleCell>, char)>,
}

impl Default for TranslationTable {
    fn default() -> Self {
        TranslationTable::parse(DEFAULT_TABLE)
            .expect("embedded default table is valid")
    }
}

impl TranslationTable {
    /// Parses a table from the external text format: one mapping per line,
    /// `<char><TAB><dot-list[,dot-list...]>`. Dots of one cell may be written
    /// either comma-separated (`2,3,5`) or as one digit group (`235`); when a
    /// value holds several multi-digit groups, each group is one cell of a
    /// multi-cell sequence. The value `0` maps to the blank cell. Empty lines
    /// and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self, BrailleError> {
        let mut merged = TranslationTable::empty();
        merged.merge_from(text)?;
        merged.validate()?;
        Ok(merged)
    }

    /// Default table with `text` entries merged over it (override or extend).
    pub fn with_overrides(text: &str) -> Result<Self, BrailleError> {
        let mut table = TranslationTable::default();
        table.merge_from(text)?;
        table.rebuild_decode_maps();
        table.validate()?;
        Ok(table)
    }

    fn empty() -> Self {
        TranslationTable {
            entries: BTreeMap::new(),
            decode_single: BTreeMap::new(),
            decode_digit: BTreeMap::new(),
            decode_multi: Vec::new(),
        }
    }

    fn merge_from(&mut self, text: &str) -> Result<(), BrailleError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            if raw.is_empty() || raw.starts_with('#') {
                continue;
            }
            let (ch_part, dots_part) = raw.split_once('\t').ok_or_else(|| {
                BrailleError::InvalidTable {
                    line,
                    message: "expected <char><TAB><dots>".into(),
                }
            })?;
            let mut chars = ch_part.chars();
            let ch = chars.next().ok_or_else(|| BrailleError::InvalidTable {
                line,
                message: "missing character".into(),
            })?;
            if chars.next().is_some() {
                return Err(BrailleError::InvalidTable {
                    line,
                    message: format!("key {ch_part:?} is not a single character"),
                });
            }
            let cells = parse_cells(dots_part).map_err(|message| {
                BrailleError::InvalidTable { line, message }
            })?;
            self.entries.insert(ch, cells);
        }
        self.rebuild_decode_maps();
        Ok(())
    }

    fn rebuild_decode_maps(&mut self) {
        self.decode_single.clear();
        self.decode_digit.clear();
        self.decode_multi.clear();
        for (&ch, cells) in &self.entries {
            if ch.is_ascii_digit() {
                if let [cell] = cells[..] {
                    self.decode_digit.insert(cell, ch);
                }
                continue;
            }
            match cells[..] {
                [cell] => {
                    self.decode_single.insert(cell, ch);
                }
                _ => self.decode_multi.push((cells.clone(), ch)),
            }
        }
        // Longest-first so greedy decoding is deterministic.
        self.decode_multi.sort_by(|a, b| {
            b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0))
        });
    }

    /// Ensures every emitted sequence decodes back to exactly one character.
    fn validate(&self) -> Result<(), BrailleError> {
        let invalid = |message: String| BrailleError::InvalidTable { line: 0, message };
        let prefixes = [CAPITAL_SIGN, NUMBER_SIGN, LETTER_SIGN];
        let mut seen_single: BTreeMap<BrailleCell, char> = BTreeMap::new();
        let mut seen_digit: BTreeMap<BrailleCell, char> = BTreeMap::new();
        for (&ch, cells) in &self.entries {
            if cells.is_empty() {
                return Err(invalid(format!("{ch:?} maps to an empty sequence")));
            }
            if ch.is_ascii_digit() {
                let [cell] = cells[..] else {
                    return Err(invalid(format!("digit {ch:?} must map to one cell")));
                };
                if prefixes.contains(&cell) {
                    return Err(invalid(format!("digit {ch:?} collides with a prefix cell")));
                }
                if let Some(prev) = seen_digit.insert(cell, ch) {
                    return Err(invalid(format!("digits {prev:?} and {ch:?} share a cell")));
                }
                continue;
            }
            if cells.iter().any(|c| prefixes.contains(c)) {
                return Err(invalid(format!("{ch:?} uses a reserved prefix cell")));
            }
            if let [cell] = cells[..] {
                if let Some(prev) = seen_single.insert(cell, ch) {
                    return Err(invalid(format!("{prev:?} and {ch:?} share cell {cell}")));
                }
            }
        }
        // Multi-cell entries must be prefix-free against every other entry so
        // greedy longest-match decoding is unambiguous.
        for (seq, ch) in &self.decode_multi {
            for (other_seq, other_ch) in &self.decode_multi {
                if ch != other_ch && other_seq.starts_with(seq) {
                    return Err(invalid(format!(
                        "{ch:?} is a prefix of {other_ch:?}"
                    )));
                }
            }
            if self.decode_single.contains_key(&seq[0]) {
                return Err(invalid(format!(
                    "{ch:?} starts with a cell already mapped to a single-cell entry"
                )));
            }
        }
        Ok(())
    }

    pub fn lookup(&self, ch: char) -> Option<&[BrailleCell]> {
        self.entries.get(&ch).map(Vec::as_slice)
    }

    /// Translates text to cells. Digit runs get one number-sign prefix each,
    /// uppercase letters a capital sign, and a letter that would read as a
    /// digit right after a digit run gets a letter sign.
    pub fn encode(&self, text: &str) -> Result<Vec<BrailleCell>, BrailleError> {
        let mut cells = Vec::new();
        let mut in_digit_run = false;
        for (position, ch) in text.chars().enumerate() {
            if ch.is_ascii_digit() {
                if !in_digit_run {
                    cells.push(NUMBER_SIGN);
                    in_digit_run = true;
                }
                let seq = self
                    .lookup(ch)
                    .ok_or(BrailleError::UnsupportedCharacter { position, ch })?;
                cells.extend_from_slice(seq);
                continue;
            }
            let (seq, capital) = if ch.is_uppercase() {
                let lower = ch.to_lowercase().next().unwrap();
                match self.lookup(lower) {
                    Some(seq) => (seq, true),
                    None => return Err(BrailleError::UnsupportedCharacter { position, ch }),
                }
            } else {
                match self.lookup(ch) {
                    Some(seq) => (seq, false),
                    None => return Err(BrailleError::UnsupportedCharacter { position, ch }),
                }
            };
            if capital {
                // The capital sign itself terminates number mode on read-back.
                cells.push(CAPITAL_SIGN);
            } else if in_digit_run && self.decode_digit.contains_key(&seq[0]) {
                cells.push(LETTER_SIGN);
            }
            cells.extend_from_slice(seq);
            in_digit_run = false;
        }
        Ok(cells)
    }

    /// Inverse of [`Self::encode`] for sequences this table produced.
    pub fn decode(&self, cells: &[BrailleCell]) -> Result<String, BrailleError> {
        let mut out = String::new();
        let mut i = 0;
        let mut number_mode = false;
        let mut capital_next = false;
        while i < cells.len() {
            let cell = cells[i];
            if cell == NUMBER_SIGN {
                number_mode = true;
                i += 1;
                if i >= cells.len() || !self.decode_digit.contains_key(&cells[i]) {
                    return Err(BrailleError::UndecodableSequence { index: i - 1 });
                }
                continue;
            }
            if cell == CAPITAL_SIGN {
                capital_next = true;
                number_mode = false;
                i += 1;
                continue;
            }
            if cell == LETTER_SIGN {
                number_mode = false;
                i += 1;
                continue;
            }
            if number_mode {
                if let Some(&digit) = self.decode_digit.get(&cell) {
                    out.push(digit);
                    i += 1;
                    continue;
                }
                number_mode = false;
            }
            let (ch, consumed) = self.decode_entry(cells, i)?;
            if capital_next {
                if !ch.is_alphabetic() {
                    return Err(BrailleError::UndecodableSequence { index: i });
                }
                out.extend(ch.to_uppercase());
                capital_next = false;
            } else {
                out.push(ch);
            }
            i += consumed;
        }
        if capital_next {
            // Dangling capital sign with nothing to capitalize.
            return Err(BrailleError::UndecodableSequence { index: cells.len() - 1 });
        }
        Ok(out)
    }

    fn decode_entry(
        &self,
        cells: &[BrailleCell],
        index: usize,
    ) -> Result<(char, usize), BrailleError> {
        for (seq, ch) in &self.decode_multi {
            if cells[index..].starts_with(seq) {
                return Ok((*ch, seq.len()));
            }
        }
        if let Some(&ch) = self.decode_single.get(&cells[index]) {
            return Ok((ch, 1));
        }
        Err(BrailleError::UndecodableSequence { index })
    }
}

/// Parses the dots field of one table line into a cell sequence.
fn parse_cells(value: &str) -> Result<Vec<BrailleCell>, String> {
    if value == "0" {
        return Ok(vec![BrailleCell::BLANK]);
    }
    if value.is_empty() {
        return Err("empty dots field".into());
    }
    let groups: Vec<&str> = value.split(',').collect();
    if groups.iter().any(|g| g.is_empty()) {
        return Err(format!("empty dot group in {value:?}"));
    }
    let group_dots = |group: &str| -> Result<Vec<u8>, String> {
        group
            .chars()
            .map(|c| match c.to_digit(10) {
                Some(d @ 1..=6) => Ok(d as u8),
                _ => Err(format!("invalid dot {c:?} in {value:?}")),
            })
            .collect()
    };
    // `2,3,5` reads as one cell with dots 2, 3 and 5 (the braille-friendly
    // form); values with any multi-digit group, e.g. `56,235`, read as one
    // cell per group.
    if groups.iter().all(|g| g.len() == 1) {
        let dots = group_dots(&groups.concat())?;
        let mut seen = 0u8;
        for &d in &dots {
            if seen & (1 << (d - 1)) != 0 {
                return Err(format!("duplicate dot {d} in {value:?}"));
            }
            seen |= 1 << (d - 1);
        }
        return Ok(vec![BrailleCell::from_dots(&dots).map_err(|e| e.to_string())?]);
    }
    groups
        .iter()
        .map(|g| {
            let dots = group_dots(g)?;
            BrailleCell::from_dots(&dots).map_err(|e| e.to_string())
        })
        .collect()
}
