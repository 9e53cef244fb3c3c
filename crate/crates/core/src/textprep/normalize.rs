//! Placeholder substitution for URLs, emails, phone numbers, currency symbols, and numbers.

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

pub const URL_PLACEHOLDER: &str = "httpaddr";
pub const EMAIL_PLACEHOLDER: &str = "emailaddr";
pub const PHONE_PLACEHOLDER: &str = "phonenumbr";
pub const MONEY_PLACEHOLDER: &str = "moneysymb";
pub const NUMBER_PLACEHOLDER: &str = "numbr";

/// Pattern classes, in the fixed order they are applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternClass {
    Url,
    Email,
    Phone,
    Money,
    Number,
}

impl PatternClass {
    pub const ORDER: [PatternClass; 5] = [
        PatternClass::Url,
        PatternClass::Email,
        PatternClass::Phone,
        PatternClass::Money,
        PatternClass::Number,
    ];

    pub fn placeholder(self) -> &'static str {
        match self {
            PatternClass::Url => URL_PLACEHOLDER,
            PatternClass::Email => EMAIL_PLACEHOLDER,
            PatternClass::Phone => PHONE_PLACEHOLDER,
            PatternClass::Money => MONEY_PLACEHOLDER,
            PatternClass::Number => NUMBER_PLACEHOLDER,
        }
    }

    fn regex(self) -> &'static Regex {
        static URL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)(?:https?://|www\.)\S+").unwrap());
        static EMAIL: LazyLock<Regex> = LazyLock::new(|| {
            Regex::new(r"[A-Za-z0-9._%+\-]+@[A-Za-z0-9\-]+(?:\.[A-Za-z0-9\-]+)*\.[A-Za-z]{2,}").unwrap()
        });
        // At least seven digits, optionally led by `+`, separated by at most
        // two of `-`, `.`, `(`, `)`, or space.
        static PHONE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\+?\b\d(?:[\-. ()]{0,2}\d){6,}\b").unwrap());
        static MONEY: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"[$£€]").unwrap());
        // A whole digit run with its comma and point separators, so no digit
        // fragment survives to match on a second pass.
        static NUMBER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\b\d+(?:[,.]\d+)*").unwrap());
        match self {
            PatternClass::Url => &URL,
            PatternClass::Email => &EMAIL,
            PatternClass::Phone => &PHONE,
            PatternClass::Money => &MONEY,
            PatternClass::Number => &NUMBER,
        }
    }
}

/// Which placeholder rules are enabled. Application order is always
/// url, email, phone, money, number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizerRules {
    pub url: bool,
    pub email: bool,
    pub phone: bool,
    pub money: bool,
    pub number: bool,
}

impl NormalizerRules {
    pub const fn all() -> Self {
        NormalizerRules {
            url: true,
            email: true,
            phone: true,
            money: true,
            number: true,
        }
    }

    pub const fn none() -> Self {
        NormalizerRules {
            url: false,
            email: false,
            phone: false,
            money: false,
            number: false,
        }
    }

    pub fn enabled(&self, class: PatternClass) -> bool {
        match class {
            PatternClass::Url => self.url,
            PatternClass::Email => self.email,
            PatternClass::Phone => self.phone,
            PatternClass::Money => self.money,
            PatternClass::Number => self.number,
        }
    }

    /// Enabled rules with their placeholders, in application order.
    pub fn ordered(&self) -> Vec<(PatternClass, &'static str)> {
        PatternClass::ORDER
            .into_iter()
            .filter(|c| self.enabled(*c))
            .map(|c| (c, c.placeholder()))
            .collect()
    }
}

impl Default for NormalizerRules {
    fn default() -> Self {
        NormalizerRules::all()
    }
}

/// Replaces every match of the enabled rules by its placeholder.
///
/// A space is inserted before the placeholder unless the preceding output
/// already ends in whitespace, and after it when the following input
/// character is neither whitespace nor end of text. Unmatched text is
/// copied byte for byte.
pub fn normalize(text: &str, rules: &NormalizerRules) -> String {
    let mut current = text.to_owned();
    for (class, placeholder) in rules.ordered() {
        current = replace_class(&current, class.regex(), placeholder);
    }
    current
}

fn replace_class(input: &str, re: &Regex, placeholder: &str) -> String {
    let mut out = String::with_capacity(input.len() + 16);
    let mut last = 0;
    for m in re.find_iter(input) {
        out.push_str(&input[last..m.start()]);
        if !out.chars().next_back().is_some_and(char::is_whitespace) {
            out.push(' ');
        }
        out.push_str(placeholder);
        if input[m.end()..].chars().next().is_some_and(|c| !c.is_whitespace()) {
            out.push(' ');
        }
        last = m.end();
    }
    out.push_str(&input[last..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all(text: &str) -> String {
        normalize(text, &NormalizerRules::all())
    }

    #[test]
    fn url_in_coronavirus_example() {
        let src = "Coronavirus Australia: Woolworths to give elderly, disabled dedicated shopping hours amid COVID-19 outbreak https://t.co/bInCA9Vp8P";
        let out = normalize(
            src,
            &NormalizerRules {
                url: true,
                ..NormalizerRules::none()
            },
        );
        assert_eq!(
            out,
            "Coronavirus Australia: Woolworths to give elderly, disabled dedicated shopping hours amid COVID-19 outbreak httpaddr"
        );
    }

    #[test]
    fn grouped_number_is_one_match() {
        assert_eq!(all("13,000 people"), " numbr people");
        assert_eq!(all("it is 3.5 degrees"), "it is numbr degrees");
    }

    #[test]
    fn money_then_number_and_email() {
        assert_eq!(all("pay $5 via a@b.com"), "pay moneysymb numbr via emailaddr");
    }

    #[test]
    fn phone_wins_over_number() {
        assert_eq!(all("call +1 555-123-4567 now"), "call phonenumbr now");
        assert_eq!(all("call 5551234"), "call phonenumbr");
        assert_eq!(all("year 2015"), "year numbr");
        assert_eq!(all("13,00013,000x"), " numbr x");
    }

    #[test]
    fn disabled_rules_leave_text_alone() {
        let src = "see https://x.y $5 100";
        assert_eq!(normalize(src, &NormalizerRules::none()), src);
    }

    #[test]
    fn idempotent_on_examples() {
        for s in [
            "13,000 people receive #wildfires",
            "mail me: joe.bloggs@example.co.uk or call (555) 123-4567",
            "£3.50 at www.shop.com/deal?x=1,2",
            "$$$ 1,2,3 1.2.3",
        ] {
            let once = all(s);
            assert_eq!(all(&once), once, "input {s:?}");
        }
    }
}
