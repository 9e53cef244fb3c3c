//! Tweet normalization, tokenization, stopword removal, and stemming.

mod normalize;
mod porter;
mod stopwords;
mod tokenize;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use normalize::{
    normalize, NormalizerRules, PatternClass, EMAIL_PLACEHOLDER, MONEY_PLACEHOLDER, NUMBER_PLACEHOLDER,
    PHONE_PLACEHOLDER, URL_PLACEHOLDER,
};
pub use porter::{stem, stem_word};
pub use stopwords::{english_stopwords, remove_stopwords, ENGLISH_STOPWORDS, STOPWORDS_VERSION};
pub use tokenize::{tokenize, EMOTICONS};

/// A non-empty token without whitespace.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Token(String);

impl Token {
    pub fn new(surface: &str) -> Option<Token> {
        if surface.is_empty() || surface.chars().any(char::is_whitespace) {
            None
        } else {
            Some(Token(surface.to_owned()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl<'de> Deserialize<'de> for Token {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Token::new(&s).ok_or_else(|| serde::de::Error::custom("token is empty or contains whitespace"))
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Per-character lowercase. Multi-character expansions are kept.
pub fn lowercase(token: &Token) -> Token {
    let lower: String = token.0.chars().flat_map(char::to_lowercase).collect();
    Token::new(&lower).unwrap_or_else(|| token.clone())
}

/// Stage toggles. `rules` selects the placeholders used when `normalize` is on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrepConfig {
    pub normalize: bool,
    #[serde(default)]
    pub rules: NormalizerRules,
    pub lowercase: bool,
    pub remove_stopwords: bool,
    pub stem: bool,
    pub stopword_list: BTreeSet<String>,
}

impl PrepConfig {
    /// All stages off: output is `tokenize(text)`.
    pub fn raw() -> Self {
        PrepConfig {
            normalize: false,
            rules: NormalizerRules::all(),
            lowercase: false,
            remove_stopwords: false,
            stem: false,
            stopword_list: english_stopwords(),
        }
    }

    /// Every stage on, with the shipped stopword list.
    pub fn full() -> Self {
        PrepConfig {
            normalize: true,
            lowercase: true,
            remove_stopwords: true,
            stem: true,
            ..PrepConfig::raw()
        }
    }

    pub fn with_stopword_removal(mut self, on: bool) -> Self {
        self.remove_stopwords = on;
        self
    }

    pub fn validate(&self) -> crate::Result<()> {
        for w in &self.stopword_list {
            if w.is_empty() || *w != w.to_lowercase() {
                return Err(crate::Error::InvalidConfig(format!(
                    "stopword {w:?} must be non-empty and lowercase"
                )));
            }
        }
        Ok(())
    }
}

impl Default for PrepConfig {
    fn default() -> Self {
        PrepConfig::full()
    }
}

/// Runs normalize, tokenize, lowercase, stopword removal, and stemming, skipping disabled stages.
pub fn preprocess(text: &str, config: &PrepConfig) -> Vec<Token> {
    let normalized;
    let text = if config.normalize {
        normalized = normalize(text, &config.rules);
        normalized.as_str()
    } else {
        text
    };
    let mut tokens = tokenize(text);
    if config.lowercase {
        tokens = tokens.iter().map(lowercase).collect();
    }
    if config.remove_stopwords {
        tokens = remove_stopwords(tokens, &config.stopword_list);
    }
    if config.stem {
        tokens = tokens.iter().map(stem).collect();
    }
    tokens
}

/// Output after each enabled stage, as `(stage, rendering)` lines.
pub fn trace(text: &str, config: &PrepConfig) -> Vec<(&'static str, String)> {
    let join = |t: &[Token]| t.iter().map(Token::as_str).collect::<Vec<_>>().join(" ");
    let mut out = vec![("input", text.to_owned())];
    let mut current = text.to_owned();
    if config.normalize {
        current = normalize(&current, &config.rules);
        out.push(("normalize", current.clone()));
    }
    let mut tokens = tokenize(&current);
    out.push(("tokenize", join(&tokens)));
    if config.lowercase {
        tokens = tokens.iter().map(lowercase).collect();
        out.push(("lowercase", join(&tokens)));
    }
    if config.remove_stopwords {
        tokens = remove_stopwords(tokens, &config.stopword_list);
        out.push(("remove_stopwords", join(&tokens)));
    }
    if config.stem {
        tokens = tokens.iter().map(stem).collect();
        out.push(("stem", join(&tokens)));
    }
    out
}
