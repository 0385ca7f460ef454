//! Symbol words and their text encoding.
//!
//! Symbols are `u8` values below the alphabet size. In text they are written
//! with one character each: `0`-`9` then `a`-`z`, so alphabets up to 36
//! symbols round-trip through strings.

use crate::error::{Error, Result};

pub type Symbol = u8;
pub type Word = Vec<Symbol>;

pub const MAX_TEXT_ALPHABET: usize = 36;

pub fn symbol_char(s: Symbol) -> char {
    std::char::from_digit(s as u32, MAX_TEXT_ALPHABET as u32).unwrap_or('?')
}

pub fn word_to_string(w: &[Symbol]) -> String {
    w.iter().map(|&s| symbol_char(s)).collect()
}

pub fn parse_word(text: &str) -> Result<Word> {
    text.chars()
        .map(|c| {
            c.to_digit(MAX_TEXT_ALPHABET as u32)
                .map(|d| d as Symbol)
                .ok_or_else(|| Error::Parse(format!("bad symbol {c:?} in word {text:?}")))
        })
        .collect()
}

/// `serde(with = "word_text")` adapter storing words as strings.
pub mod word_text {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(w: &[Symbol], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&word_to_string(w))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Word, D::Error> {
        let text = String::deserialize(d)?;
        parse_word(&text).map_err(serde::de::Error::custom)
    }
}

/// Same as [`word_text`] for a list of words.
pub mod word_list_text {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(ws: &[Word], s: S) -> std::result::Result<S::Ok, S::Error> {
        ws.iter().map(|w| word_to_string(w)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Word>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| parse_word(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let w = vec![0, 1, 9, 10, 35];
        let t = word_to_string(&w);
        assert_eq!(t, "019az");
        assert_eq!(parse_word(&t).unwrap(), w);
        assert!(parse_word("0-1").is_err());
    }
}
