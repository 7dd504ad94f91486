//! Integer to numeral-word conversion for German and English, 0..=999_999.

const EN_ONES: [&str; 20] = [
    "zero",
    "one",
    "two",
    "three",
    "four",
    "five",
    "six",
    "seven",
    "eight",
    "nine",
    "ten",
    "eleven",
    "twelve",
    "thirteen",
    "fourteen",
    "fifteen",
    "sixteen",
    "seventeen",
    "eighteen",
    "nineteen",
];
const EN_TENS: [&str; 10] = [
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
];

const DE_ONES: [&str; 20] = [
    "null",
    "eins",
    "zwei",
    "drei",
    "vier",
    "fünf",
    "sechs",
    "sieben",
    "acht",
    "neun",
    "zehn",
    "elf",
    "zwölf",
    "dreizehn",
    "vierzehn",
    "fünfzehn",
    "sechzehn",
    "siebzehn",
    "achtzehn",
    "neunzehn",
];
const DE_TENS: [&str; 10] = [
    "", "", "zwanzig", "dreißig", "vierzig", "fünfzig", "sechzig", "siebzig", "achtzig", "neunzig",
];

pub const MAX_CONVERTIBLE: u32 = 999_999;

/// English words, American style without "and": 142 is "one hundred forty-two".
pub fn english(n: u32) -> Option<String> {
    if n > MAX_CONVERTIBLE {
        return None;
    }
    if n == 0 {
        return Some(EN_ONES[0].to_string());
    }
    let mut parts = Vec::new();
    let (thousands, rest) = (n / 1000, n % 1000);
    if thousands > 0 {
        parts.push(format!("{} thousand", english_below_1000(thousands)));
    }
    if rest > 0 {
        parts.push(english_below_1000(rest));
    }
    Some(parts.join(" "))
}

fn english_below_1000(n: u32) -> String {
    debug_assert!((1..1000).contains(&n));
    let (hundreds, rest) = (n / 100, n % 100);
    let mut parts = Vec::new();
    if hundreds > 0 {
        parts.push(format!("{} hundred", EN_ONES[hundreds as usize]));
    }
    if rest > 0 {
        parts.push(if rest < 20 {
            EN_ONES[rest as usize].to_string()
        } else if rest % 10 == 0 {
            EN_TENS[(rest / 10) as usize].to_string()
        } else {
            format!("{}-{}", EN_TENS[(rest / 10) as usize], EN_ONES[(rest % 10) as usize])
        });
    }
    parts.join(" ")
}

/// German words written as one compound: 21 is "einundzwanzig", 1001 is
/// "eintausendeins".
pub fn german(n: u32) -> Option<String> {
    if n > MAX_CONVERTIBLE {
        return None;
    }
    if n == 0 {
        return Some(DE_ONES[0].to_string());
    }
    let (thousands, rest) = (n / 1000, n % 1000);
    let mut out = String::new();
    if thousands > 0 {
        out.push_str(&german_below_1000(thousands, true));
        out.push_str("tausend");
    }
    if rest > 0 {
        out.push_str(&german_below_1000(rest, false));
    }
    Some(out)
}

// `prefix` selects the bound form "ein" for a trailing 1 (eintausend).
fn german_below_1000(n: u32, prefix: bool) -> String {
    debug_assert!((1..1000).contains(&n));
    let (hundreds, rest) = (n / 100, n % 100);
    let mut out = String::new();
    if hundreds > 0 {
        out.push_str(if hundreds == 1 {
            "ein"
        } else {
            DE_ONES[hundreds as usize]
        });
        out.push_str("hundert");
    }
    match rest {
        0 => {}
        1 if prefix => out.push_str("ein"),
        1..=19 => out.push_str(DE_ONES[rest as usize]),
        _ => {
            let (tens, ones) = (rest / 10, rest % 10);
            if ones > 0 {
                out.push_str(if ones == 1 { "ein" } else { DE_ONES[ones as usize] });
                out.push_str("und");
            }
            out.push_str(DE_TENS[tens as usize]);
        }
    }
    out
}
