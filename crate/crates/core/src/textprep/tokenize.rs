//! Tweet-aware tokenizer.
//!
//! Scans left to right and, at each position, takes the first matching
//! class: URL, emoticon, email, mention, hashtag, separated number,
//! word (with inner apostrophes, hyphens, underscores), plain word
//! characters, dot runs, emoji cluster, and finally any single character.

use std::sync::LazyLock;

use regex::Regex;

use super::Token;

/// Emoticons kept whole. Longest entries win when several match.
pub const EMOTICONS: &[&str] = &[
    ":)", ":-)", ":))", ":)))", ":(", ":-(", ":((", ":D", ":-D", ";)", ";-)", ";D", ":P", ":-P", ":p", ":-p", ";P",
    ";p", ":O", ":-O", ":o", ":-o", ":/", ":-/", ":\\", ":|", ":-|", ":*", ":-*", ":'(", ":'-(", ":')", ":$", ":@",
    ":3", "=)", "=(", "=D", "=P", "=/", ">:(", ">:-(", ">:)", "<3", "<33", "</3", "XD", "xD", "XP", "T_T", "^_^", "^^",
    "-_-", "o_O", "O_o", "o.O", "(:", "):", "D:", "8)", "8-)", "B)", "B-)", "\\o/", ":-]", ":]", ":[", ":-[", ":>",
    ":<",
];

static PATTERNS: LazyLock<[Regex; 8]> = LazyLock::new(|| {
    [
        Regex::new(r"^(?i:https?://|www\.)\S+").unwrap(),
        Regex::new(r"^[\w.+\-]+@[\w\-]+(?:\.[\w\-]+)+").unwrap(),
        Regex::new(r"^@\w+").unwrap(),
        Regex::new(r"^#+\w+").unwrap(),
        Regex::new(r"^[+\-]?\d+(?:[,/.:\-]\d+)+").unwrap(),
        Regex::new(r"^[\p{L}\p{M}](?:[\p{L}\p{M}]|['’\-_])*[\p{L}\p{M}]").unwrap(),
        Regex::new(r"^\w+").unwrap(),
        Regex::new(r"^\.{2,}").unwrap(),
    ]
});

static EMOTICONS_BY_LENGTH: LazyLock<Vec<&'static str>> = LazyLock::new(|| {
    let mut v = EMOTICONS.to_vec();
    v.sort_by_key(|e| std::cmp::Reverse(e.len()));
    v
});

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn emoticon_at(text: &str, pos: usize) -> Option<usize> {
    let rest = &text[pos..];
    let prev = text[..pos].chars().next_back();
    EMOTICONS_BY_LENGTH.iter().find_map(|e| {
        if !rest.starts_with(e) {
            return None;
        }
        let first = e.chars().next()?;
        let last = e.chars().next_back()?;
        if is_word_char(first) && prev.is_some_and(is_word_char) {
            return None;
        }
        let next = rest[e.len()..].chars().next();
        if is_word_char(last) && next.is_some_and(is_word_char) {
            return None;
        }
        Some(e.len())
    })
}

fn is_emoji(c: char) -> bool {
    matches!(c as u32,
        0x1F000..=0x1FAFF | 0x2600..=0x27BF | 0x2300..=0x23FF | 0x2B00..=0x2BFF)
}

fn is_emoji_continuation(c: char) -> bool {
    matches!(c as u32, 0xFE0E | 0xFE0F | 0x20E3 | 0x1F3FB..=0x1F3FF | 0xE0020..=0xE007F)
}

/// Emoji plus modifiers, variation selectors, and ZWJ-joined emoji.
fn emoji_cluster(rest: &str) -> Option<usize> {
    let mut it = rest.char_indices().peekable();
    let (_, first) = it.next()?;
    if !is_emoji(first) {
        return None;
    }
    let mut end = first.len_utf8();
    let regional = (0x1F1E6..=0x1F1FF).contains(&(first as u32));
    while let Some(&(i, c)) = it.peek() {
        if is_emoji_continuation(c) {
            end = i + c.len_utf8();
            it.next();
        } else if c == '\u{200D}' {
            it.next();
            match it.peek() {
                Some(&(j, d)) if is_emoji(d) => {
                    end = j + d.len_utf8();
                    it.next();
                }
                _ => break,
            }
        } else if regional && end == first.len_utf8() && (0x1F1E6..=0x1F1FF).contains(&(c as u32)) {
            end = i + c.len_utf8();
            it.next();
        } else {
            break;
        }
    }
    Some(end)
}

/// Splits `text` into tokens. Tokens are never empty and never contain whitespace.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < text.len() {
        let rest = &text[pos..];
        let c = rest.chars().next().expect("non-empty rest");
        if c.is_whitespace() {
            pos += c.len_utf8();
            continue;
        }
        let len = match_at(text, pos).unwrap_or(c.len_utf8());
        tokens.extend(Token::new(&text[pos..pos + len]));
        pos += len;
    }
    tokens
}

fn match_at(text: &str, pos: usize) -> Option<usize> {
    let rest = &text[pos..];
    let p = &*PATTERNS;
    if let Some(m) = p[0].find(rest) {
        return Some(m.end());
    }
    if let Some(n) = emoticon_at(text, pos) {
        return Some(n);
    }
    for re in &p[1..] {
        if let Some(m) = re.find(rest) {
            return Some(m.end());
        }
    }
    emoji_cluster(rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s).into_iter().map(|t| t.as_str().to_owned()).collect()
    }

    #[test]
    fn heart_is_one_token() {
        assert_eq!(toks("I <3 this"), ["I", "<3", "this"]);
    }

    #[test]
    fn disaster_example() {
        assert_eq!(
            toks("13,000 people receive #wildfires evacuation orders"),
            ["13,000", "people", "receive", "#wildfires", "evacuation", "orders"]
        );
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("  \n\t ").is_empty());
    }

    #[test]
    fn tweet_entities() {
        assert_eq!(
            toks("@tiniebeany don't panic!!! see https://t.co/x :-( a@b.com ..."),
            [
                "@tiniebeany",
                "don't",
                "panic",
                "!",
                "!",
                "!",
                "see",
                "https://t.co/x",
                ":-(",
                "a@b.com",
                "..."
            ]
        );
    }

    #[test]
    fn letter_emoticons_need_boundaries() {
        assert_eq!(toks("XD lol"), ["XD", "lol"]);
        assert_eq!(toks("XDR"), ["XDR"]);
        assert_eq!(toks("(18)"), ["(", "18", ")"]);
        assert_eq!(toks("cool 8)"), ["cool", "8)"]);
    }

    #[test]
    fn emoji_clusters() {
        assert_eq!(toks("fire🔥🔥 ok"), ["fire", "🔥", "🔥", "ok"]);
        assert_eq!(
            toks("👍🏽 family 👨\u{200D}👩\u{200D}👧"),
            ["👍🏽", "family", "👨\u{200D}👩\u{200D}👧"]
        );
        assert_eq!(toks("🇺🇸🇬🇧"), ["🇺🇸", "🇬🇧"]);
    }

    #[test]
    fn every_emoticon_round_trips() {
        for e in EMOTICONS {
            assert_eq!(toks(&format!(" {e} ")), [*e], "emoticon {e:?}");
        }
    }
}
