//! Fixed English stopword list.

use std::collections::BTreeSet;

use super::Token;

/// Identifier of the shipped list. Changes whenever an entry does.
pub const STOPWORDS_VERSION: &str = "en-1";

/// The shipped list, lowercase, no duplicates.
pub const ENGLISH_STOPWORDS: &[&str] = &[
    "a",
    "about",
    "above",
    "after",
    "again",
    "against",
    "all",
    "am",
    "an",
    "and",
    "any",
    "are",
    "as",
    "at",
    "be",
    "because",
    "been",
    "before",
    "being",
    "below",
    "between",
    "both",
    "but",
    "by",
    "can",
    "could",
    "did",
    "do",
    "does",
    "doing",
    "down",
    "during",
    "each",
    "few",
    "for",
    "from",
    "further",
    "had",
    "has",
    "have",
    "having",
    "he",
    "her",
    "here",
    "hers",
    "herself",
    "him",
    "himself",
    "his",
    "how",
    "i",
    "if",
    "in",
    "into",
    "is",
    "it",
    "it's",
    "its",
    "itself",
    "just",
    "me",
    "more",
    "most",
    "my",
    "myself",
    "no",
    "nor",
    "not",
    "now",
    "of",
    "off",
    "on",
    "once",
    "only",
    "or",
    "other",
    "our",
    "ours",
    "ourselves",
    "out",
    "over",
    "own",
    "same",
    "she",
    "should",
    "so",
    "some",
    "such",
    "than",
    "that",
    "the",
    "their",
    "theirs",
    "them",
    "themselves",
    "then",
    "there",
    "these",
    "they",
    "this",
    "those",
    "through",
    "to",
    "too",
    "under",
    "until",
    "up",
    "very",
    "was",
    "we",
    "were",
    "what",
    "when",
    "where",
    "which",
    "while",
    "who",
    "whom",
    "why",
    "will",
    "with",
    "would",
    "you",
    "you're",
    "your",
    "yours",
    "yourself",
    "yourselves",
    "i'm",
    "don't",
    "can't",
    "won't",
    "isn't",
    "aren't",
    "wasn't",
    "didn't",
    "doesn't",
    "that's",
    "there's",
    "let's",
    "also",
    "via",
    "rt",
    "amp",
    "us",
    "may",
    "might",
    "must",
    "shall",
    "however",
];

pub fn english_stopwords() -> BTreeSet<String> {
    ENGLISH_STOPWORDS.iter().map(|s| (*s).to_owned()).collect()
}

/// Drops tokens whose lowercased surface is in `stopwords`, keeping order.
pub fn remove_stopwords(tokens: Vec<Token>, stopwords: &BTreeSet<String>) -> Vec<Token> {
    if stopwords.is_empty() {
        return tokens;
    }
    tokens
        .into_iter()
        .filter(|t| !stopwords.contains(&t.as_str().to_lowercase()))
        .collect()
}
