//! Substitution sequences, the Rudin–Shapiro sequence and its metrized two-sided shift.

mod sequence;
mod substitution;
mod window;

pub use sequence::{
    certified_language, correlation, correlations, factor_count, frequency_doublings, language,
    rudin_shapiro_prefix, word_frequency, FrequencyTrace, Generator, Language, SymbolSequence,
    DEFAULT_SCAN_FACTOR,
};
pub use substitution::{iterate_substitution, Substitution};
pub use window::{GrowthRow, GrowthTable, ShiftSpace, ShiftTransitions};

use crate::csv::{num, CsvTable};
use crate::error::Result;

/// `(L, p_L)` for `L` in `lengths`, each from a certified scan.
pub fn complexity_csv(seq: &mut SymbolSequence, lengths: impl IntoIterator<Item = usize>) -> Result<CsvTable> {
    let mut t = CsvTable::new(["length", "count"]);
    for l in lengths {
        let c = certified_language(seq, l)?.count();
        t.push(vec![l.to_string(), c.to_string()]);
    }
    Ok(t)
}

/// `(k, N, value)` rows for every lag and scan length.
pub fn correlation_csv(seq: &mut SymbolSequence, lags: &[usize], scans: &[usize]) -> Result<CsvTable> {
    let mut t = CsvTable::new(["k", "n", "value"]);
    for &n in scans {
        for (&k, v) in lags.iter().zip(correlations(seq, lags, n)?) {
            t.push(vec![k.to_string(), n.to_string(), num(v)]);
        }
    }
    Ok(t)
}
