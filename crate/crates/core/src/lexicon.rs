//! Affective word lexicon (valence, arousal, dominance on a 1-9 scale) and
//! the tokenizer that produces lookup keys.
//!
//! Lexicon CSV format: UTF-8, header `word,valence,arousal,dominance`, one
//! single-word entry per row.

use std::collections::BTreeMap;
use std::io::Read;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const SCORE_MIN: f64 = 1.0;
pub const SCORE_MAX: f64 = 9.0;

const HEADER: [&str; 4] = ["word", "valence", "arousal", "dominance"];

/// One of the three affective scales.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Valence,
    Arousal,
    Dominance,
}

impl Dimension {
    pub const ALL: [Dimension; 3] = [Dimension::Valence, Dimension::Arousal, Dimension::Dominance];

    pub fn name(self) -> &'static str {
        match self {
            Dimension::Valence => "valence",
            Dimension::Arousal => "arousal",
            Dimension::Dominance => "dominance",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LexiconEntry<T> {
    pub word: String,
    pub valence: T,
    pub arousal: T,
    pub dominance: T,
}

impl<T: Scalar> LexiconEntry<T> {
    pub fn score(&self, dim: Dimension) -> T {
        match dim {
            Dimension::Valence => self.valence,
            Dimension::Arousal => self.arousal,
            Dimension::Dominance => self.dominance,
        }
    }
}

/// Immutable word -> scores map.
#[derive(Debug, Clone, Default)]
pub struct Lexicon<T> {
    entries: BTreeMap<String, LexiconEntry<T>>,
}

impl<T: Scalar> Lexicon<T> {
    /// Builds a lexicon from already-validated entries, rejecting duplicates
    /// and out-of-range scores.
    pub fn from_entries(entries: impl IntoIterator<Item = LexiconEntry<T>>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, e) in entries.into_iter().enumerate() {
            validate_entry(&e).map_err(|m| Error::Lexicon(format!("entry {}: {m}", i + 1)))?;
            if map.contains_key(&e.word) {
                return Err(Error::Lexicon(format!("duplicate word `{}`", e.word)));
            }
            map.insert(e.word.clone(), e);
        }
        if map.is_empty() {
            return Err(Error::Lexicon("empty lexicon".into()));
        }
        Ok(Lexicon { entries: map })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, token: &str) -> Option<&LexiconEntry<T>> {
        self.entries.get(token)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.entries.contains_key(token)
    }

    /// Entries in ascending word order.
    pub fn iter(&self) -> impl Iterator<Item = &LexiconEntry<T>> {
        self.entries.values()
    }
}

fn validate_entry<T: Scalar>(e: &LexiconEntry<T>) -> std::result::Result<(), String> {
    if e.word.is_empty() {
        return Err("empty word".into());
    }
    if e.word.chars().any(char::is_whitespace) {
        return Err(format!("word `{}` contains whitespace", e.word));
    }
    if e.word.chars().any(char::is_uppercase) {
        return Err(format!("word `{}` is not lowercase", e.word));
    }
    let lo = T::lit(SCORE_MIN);
    let hi = T::lit(SCORE_MAX);
    for dim in Dimension::ALL {
        let s = e.score(dim);
        // NaN fails both comparisons
        if !(s >= lo && s <= hi) {
            return Err(format!("{} score {} for `{}` outside [1, 9]", dim.name(), s, e.word));
        }
    }
    Ok(())
}

/// Reads a lexicon CSV. Words are lowercased; the original norms' standard
/// deviations, if present elsewhere, are not part of the format.
pub fn load_lexicon<T: Scalar, R: Read>(source: R) -> Result<Lexicon<T>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(source);
    let header = rdr.headers().map_err(|e| Error::Lexicon(format!("header: {e}")))?;
    let found: Vec<&str> = header.iter().collect();
    if found != HEADER {
        return Err(Error::Lexicon(format!("expected header `{}`, found `{}`", HEADER.join(","), found.join(","))));
    }

    let mut entries: BTreeMap<String, LexiconEntry<T>> = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        // header is line 1
        let row = i + 2;
        let rec = rec.map_err(|e| Error::Lexicon(format!("row {row}: {e}")))?;
        if rec.len() != 4 {
            return Err(Error::Lexicon(format!("row {row}: expected 4 fields, found {}", rec.len())));
        }
        let word = rec[0].to_lowercase();
        let mut scores = [T::zero(); 3];
        for (k, slot) in scores.iter_mut().enumerate() {
            let raw = &rec[k + 1];
            let v: f64 =
                raw.parse().map_err(|_| Error::Lexicon(format!("row {row}: bad {} value `{raw}`", HEADER[k + 1])))?;
            *slot = T::lit(v);
        }
        let entry = LexiconEntry { word, valence: scores[0], arousal: scores[1], dominance: scores[2] };
        validate_entry(&entry).map_err(|m| Error::Lexicon(format!("row {row}: {m}")))?;
        if entries.contains_key(&entry.word) {
            return Err(Error::Lexicon(format!("row {row}: duplicate word `{}`", entry.word)));
        }
        entries.insert(entry.word.clone(), entry);
    }
    if entries.is_empty() {
        return Err(Error::Lexicon("empty lexicon".into()));
    }
    Ok(Lexicon { entries })
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Splits text into lowercase tokens: maximal runs of alphabetic characters,
/// with apostrophes kept only when flanked by letters on both sides.
/// Curly apostrophes are normalized to `'`.
pub fn tokenize(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphabetic() {
            cur.extend(c.to_lowercase().filter(|l| l.is_alphabetic()));
        } else if is_apostrophe(c) && !cur.is_empty() && chars.get(i + 1).is_some_and(|n| n.is_alphabetic()) {
            cur.push('\'');
        } else if !cur.is_empty() {
            tokens.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    tokens
}

/// Map lookup; absence is a normal outcome.
pub fn lookup<'a, T: Scalar>(lexicon: &'a Lexicon<T>, token: &str) -> Option<&'a LexiconEntry<T>> {
    lexicon.lookup(token)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TWO_ROWS: &str = "word,valence,arousal,dominance\nwar,2.08,7.49,6.38\nlove,8.72,6.44,6.93\n";

    #[test]
    fn loads_fixture_rows() {
        let lex: Lexicon<f64> = load_lexicon(TWO_ROWS.as_bytes()).unwrap();
        assert_eq!(lex.len(), 2);
        let war = lex.lookup("war").unwrap();
        assert_eq!((war.valence, war.arousal, war.dominance), (2.08, 7.49, 6.38));
        let love = lex.lookup("love").unwrap();
        assert_eq!((love.valence, love.arousal, love.dominance), (8.72, 6.44, 6.93));
    }

    #[test]
    fn loads_in_single_precision() {
        let lex: Lexicon<f32> = load_lexicon(TWO_ROWS.as_bytes()).unwrap();
        assert_eq!(lex.lookup("war").unwrap().valence, 2.08f32);
    }

    #[test]
    fn words_are_lowercased() {
        let lex: Lexicon<f64> = load_lexicon("word,valence,arousal,dominance\nWAR,2,7,6\n".as_bytes()).unwrap();
        assert!(lex.contains("war"));
        assert!(!lex.contains("WAR"));
    }

    #[test]
    fn header_only_is_empty_lexicon() {
        let err = load_lexicon::<f64, _>("word,valence,arousal,dominance\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("empty lexicon"), "{err}");
    }

    #[test]
    fn duplicate_word_is_rejected_by_name() {
        let src = "word,valence,arousal,dominance\nwar,2,7,6\nWar,3,7,6\n";
        let err = load_lexicon::<f64, _>(src.as_bytes()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("duplicate") && msg.contains("war"), "{msg}");
    }

    #[test]
    fn out_of_range_score_names_row() {
        let src = "word,valence,arousal,dominance\nwar,2,7,6\npeace,9.5,2,5\n";
        let msg = load_lexicon::<f64, _>(src.as_bytes()).unwrap_err().to_string();
        assert!(msg.contains("row 3"), "{msg}");
        let src = "word,valence,arousal,dominance\nodd,NaN,2,5\n";
        assert!(load_lexicon::<f64, _>(src.as_bytes()).is_err());
    }

    #[test]
    fn bounds_are_inclusive() {
        let src = "word,valence,arousal,dominance\nlow,1,1,1\nhigh,9,9,9\n";
        assert_eq!(load_lexicon::<f64, _>(src.as_bytes()).unwrap().len(), 2);
    }

    #[test]
    fn wrong_header_and_multiword_rejected() {
        assert!(load_lexicon::<f64, _>("word,v,a,d\nwar,2,7,6\n".as_bytes()).is_err());
        assert!(load_lexicon::<f64, _>("word,valence,arousal,dominance\nice cream,8,5,5\n".as_bytes()).is_err());
        assert!(load_lexicon::<f64, _>("word,valence,arousal,dominance\nwar,2,7\n".as_bytes()).is_err());
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("Bigots for Bush"), vec!["bigots", "for", "bush"]);
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("war, WAR... war!"), vec!["war", "war", "war"]);
        assert_eq!(tokenize("don't 'quote' rock'n'roll"), vec!["don't", "quote", "rock'n'roll"]);
        assert_eq!(tokenize("it\u{2019}s a''b 9/11"), vec!["it's", "a", "b"]);
        assert_eq!(tokenize("Re: Tax-cuts"), vec!["re", "tax", "cuts"]);
    }

    #[test]
    fn lookup_is_map_semantics() {
        let lex: Lexicon<f64> = load_lexicon(TWO_ROWS.as_bytes()).unwrap();
        assert_eq!(lookup(&lex, "war").unwrap().word, "war");
        assert!(lookup(&lex, "the").is_none());
    }

    #[test]
    fn from_entries_validates() {
        let e = |w: &str, v: f64| LexiconEntry { word: w.into(), valence: v, arousal: 5.0, dominance: 5.0 };
        assert!(Lexicon::from_entries(vec![e("a", 2.0), e("b", 3.0)]).is_ok());
        assert!(Lexicon::from_entries(vec![e("a", 2.0), e("a", 3.0)]).is_err());
        assert!(Lexicon::from_entries(vec![e("a", 0.5)]).is_err());
        assert!(Lexicon::<f64>::from_entries(vec![]).is_err());
    }

    proptest! {
        #[test]
        fn tokenize_is_idempotent_on_joined_output(s in "\\PC{0,80}") {
            let once = tokenize(&s);
            let twice = tokenize(&once.join(" "));
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn tokens_are_lowercase_without_separators(s in "[a-zA-Z' ,.!?éÉßİ’-]{0,60}") {
            for t in tokenize(&s) {
                prop_assert!(!t.is_empty());
                prop_assert!(!t.starts_with('\'') && !t.ends_with('\''));
                prop_assert!(t.chars().all(|c| c.is_alphabetic() || c == '\''));
                prop_assert!(!t.chars().any(char::is_uppercase));
            }
        }

        #[test]
        fn load_then_lookup_round_trips(
            rows in proptest::collection::btree_map("[a-z]{1,8}", (1.0f64..=9.0, 1.0f64..=9.0, 1.0f64..=9.0), 1..20)
        ) {
            let mut src = String::from("word,valence,arousal,dominance\n");
            for (w, (v, a, d)) in &rows {
                src.push_str(&format!("{w},{v},{a},{d}\n"));
            }
            let lex: Lexicon<f64> = load_lexicon(src.as_bytes()).unwrap();
            prop_assert_eq!(lex.len(), rows.len());
            for (w, (v, a, d)) in &rows {
                let e = lex.lookup(w).unwrap();
                prop_assert_eq!((e.valence, e.arousal, e.dominance), (*v, *a, *d));
            }
        }
    }
}
