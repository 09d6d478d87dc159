//! Embedded MARPOR category catalogue.
//!
//! The catalogue holds 143 entries: the residual category `0`, 56 major
//! categories, 32 handbook-5 subcategories and 54 additional categories from
//! the Central and Eastern European extension. The additional categories are
//! published as four-digit variables (`per1011`) and appear in annotated
//! corpora in dotted form (`101.1`); both spellings are accepted and the
//! dotted form is canonical. Several dotted codes are shared between a
//! handbook-5 subcategory and an additional category. They always roll up to
//! the same major code, so the sharing never changes a RILE class.

use serde::Serialize;

use super::RileClass;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CategoryKind {
    Residual,
    Major,
    Subcategory,
    Additional,
}

/// One catalogue entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CategoryInfo {
    /// Canonical annotation code (`0`, `ddd` or `ddd.d`).
    pub code: &'static str,
    /// Identifier in the published catalogue (`1011` for additional categories).
    pub catalogue_id: &'static str,
    pub name: &'static str,
    pub kind: CategoryKind,
}

/// A non-canonical code that is accepted and rewritten to a canonical one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CodeAlias {
    pub alias: &'static str,
    pub canonical: &'static str,
    pub note: &'static str,
}

/// A category name as it appears in the RILE left/right lists, with the code
/// it was resolved to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RileListEntry {
    pub name: &'static str,
    pub code: &'static str,
    pub class: RileClass,
    pub note: Option<&'static str>,
}

macro_rules! cat {
    ($kind:ident, $code:literal, $name:literal) => {
        CategoryInfo {
            code: $code,
            catalogue_id: $code,
            name: $name,
            kind: CategoryKind::$kind,
        }
    };
    ($kind:ident, $code:literal, $id:literal, $name:literal) => {
        CategoryInfo {
            code: $code,
            catalogue_id: $id,
            name: $name,
            kind: CategoryKind::$kind,
        }
    };
}

pub static CATEGORIES: [CategoryInfo; 143] = [
    cat!(Residual, "0", "No meaningful category applies"),
    // Domain 1: external relations
    cat!(Major, "101", "Foreign Special Relationships: Positive"),
    cat!(Major, "102", "Foreign Special Relationships: Negative"),
    cat!(Major, "103", "Anti-Imperialism"),
    cat!(Major, "104", "Military: Positive"),
    cat!(Major, "105", "Military: Negative"),
    cat!(Major, "106", "Peace"),
    cat!(Major, "107", "Internationalism: Positive"),
    cat!(Major, "108", "European Community/Union: Positive"),
    cat!(Major, "109", "Internationalism: Negative"),
    cat!(Major, "110", "European Community/Union: Negative"),
    // Domain 2: freedom and democracy
    cat!(Major, "201", "Freedom and Human Rights"),
    cat!(Major, "202", "Democracy"),
    cat!(Major, "203", "Constitutionalism: Positive"),
    cat!(Major, "204", "Constitutionalism: Negative"),
    // Domain 3: political system
    cat!(Major, "301", "Decentralisation"),
    cat!(Major, "302", "Centralisation"),
    cat!(Major, "303", "Governmental and Administrative Efficiency"),
    cat!(Major, "304", "Political Corruption"),
    cat!(Major, "305", "Political Authority"),
    // Domain 4: economy
    cat!(Major, "401", "Free Market Economy"),
    cat!(Major, "402", "Incentives: Positive"),
    cat!(Major, "403", "Market Regulation"),
    cat!(Major, "404", "Economic Planning"),
    cat!(Major, "405", "Corporatism/Mixed Economy"),
    cat!(Major, "406", "Protectionism: Positive"),
    cat!(Major, "407", "Protectionism: Negative"),
    cat!(Major, "408", "Economic Goals"),
    cat!(Major, "409", "Keynesian Demand Management"),
    cat!(Major, "410", "Economic Growth: Positive"),
    cat!(Major, "411", "Technology and Infrastructure: Positive"),
    cat!(Major, "412", "Controlled Economy"),
    cat!(Major, "413", "Nationalisation"),
    cat!(Major, "414", "Economic Orthodoxy"),
    cat!(Major, "415", "Marxist Analysis"),
    cat!(Major, "416", "Anti-Growth Economy: Positive"),
    // Domain 5: welfare and quality of life
    cat!(Major, "501", "Environmental Protection"),
    cat!(Major, "502", "Culture: Positive"),
    cat!(Major, "503", "Equality: Positive"),
    cat!(Major, "504", "Welfare State Expansion"),
    cat!(Major, "505", "Welfare State Limitation"),
    cat!(Major, "506", "Education Expansion"),
    cat!(Major, "507", "Education Limitation"),
    // Domain 6: fabric of society
    cat!(Major, "601", "National Way of Life: Positive"),
    cat!(Major, "602", "National Way of Life: Negative"),
    cat!(Major, "603", "Traditional Morality: Positive"),
    cat!(Major, "604", "Traditional Morality: Negative"),
    cat!(Major, "605", "Law and Order"),
    cat!(Major, "606", "Civic Mindedness: Positive"),
    cat!(Major, "607", "Multiculturalism: Positive"),
    cat!(Major, "608", "Multiculturalism: Negative"),
    // Domain 7: social groups
    cat!(Major, "701", "Labour Groups: Positive"),
    cat!(Major, "702", "Labour Groups: Negative"),
    cat!(Major, "703", "Agriculture and Farmers"),
    cat!(Major, "704", "Middle Class and Professional Groups"),
    cat!(Major, "705", "Unprivileged Minority Groups"),
    cat!(Major, "706", "Non-economic Demographic Groups"),
    // Handbook-5 subcategories
    cat!(Subcategory, "103.1", "Anti-Imperialism: State Centred Anti-Imperialism"),
    cat!(Subcategory, "103.2", "Anti-Imperialism: Foreign Financial Influence"),
    cat!(Subcategory, "201.1", "Freedom"),
    cat!(Subcategory, "201.2", "Human Rights"),
    cat!(Subcategory, "202.1", "Democracy General: Positive"),
    cat!(Subcategory, "202.2", "Democracy General: Negative"),
    cat!(Subcategory, "202.3", "Representative Democracy: Positive"),
    cat!(Subcategory, "202.4", "Direct Democracy: Positive"),
    cat!(Subcategory, "305.1", "Political Authority: Party Competence"),
    cat!(Subcategory, "305.2", "Political Authority: Personal Competence"),
    cat!(Subcategory, "305.3", "Political Authority: Strong Government"),
    cat!(Subcategory, "305.4", "Transition: Pre-Democratic Elites: Positive"),
    cat!(Subcategory, "305.5", "Transition: Pre-Democratic Elites: Negative"),
    cat!(Subcategory, "305.6", "Transition: Rehabilitation and Compensation"),
    cat!(Subcategory, "416.1", "Anti-Growth Economy: Positive"),
    cat!(Subcategory, "416.2", "Sustainability: Positive"),
    cat!(Subcategory, "601.1", "National Way of Life General: Positive"),
    cat!(Subcategory, "601.2", "National Way of Life: Immigration: Negative"),
    cat!(Subcategory, "602.1", "National Way of Life General: Negative"),
    cat!(Subcategory, "602.2", "National Way of Life: Immigration: Positive"),
    cat!(Subcategory, "605.1", "Law and Order: Positive"),
    cat!(Subcategory, "605.2", "Law and Order: Negative"),
    cat!(Subcategory, "606.1", "Civic Mindedness General: Positive"),
    cat!(Subcategory, "606.2", "Civic Mindedness: Bottom-Up Activism"),
    cat!(Subcategory, "607.1", "Multiculturalism General: Positive"),
    cat!(Subcategory, "607.2", "Multiculturalism: Immigrants Diversity"),
    cat!(Subcategory, "607.3", "Multiculturalism: Indigenous Rights: Positive"),
    cat!(Subcategory, "608.1", "Multiculturalism General: Negative"),
    cat!(Subcategory, "608.2", "Multiculturalism: Immigrants Assimilation"),
    cat!(Subcategory, "608.3", "Multiculturalism: Indigenous Rights: Negative"),
    cat!(Subcategory, "703.1", "Agriculture and Farmers: Positive"),
    cat!(Subcategory, "703.2", "Agriculture and Farmers: Negative"),
    // Central and Eastern European additional categories
    cat!(Additional, "101.1", "1011", "Russia/USSR/CIS: Positive"),
    cat!(Additional, "101.2", "1012", "Western States: Positive"),
    cat!(Additional, "101.3", "1013", "Eastern European Countries: Positive"),
    cat!(Additional, "101.4", "1014", "Baltic States: Positive"),
    cat!(Additional, "101.5", "1015", "Nordic Council: Positive"),
    cat!(Additional, "101.6", "1016", "SFR Yugoslavia: Positive"),
    cat!(Additional, "102.1", "1021", "Russia/USSR/CIS: Negative"),
    cat!(Additional, "102.2", "1022", "Western States: Negative"),
    cat!(Additional, "102.3", "1023", "East European Countries: Negative"),
    cat!(Additional, "102.4", "1024", "Baltic States: Negative"),
    cat!(Additional, "102.5", "1025", "Nordic Council: Negative"),
    cat!(Additional, "102.6", "1026", "SFR Yugoslavia: Negative"),
    cat!(Additional, "103.1", "1031", "Russian Army: Negative"),
    cat!(Additional, "103.2", "1032", "Independence: Positive"),
    cat!(Additional, "103.3", "1033", "Rights of Nations: Positive"),
    cat!(Additional, "202.1", "2021", "Transition to Democracy"),
    cat!(Additional, "202.2", "2022", "Restrictive Citizenship: Positive"),
    cat!(Additional, "202.3", "2023", "Lax Citizenship: Positive"),
    cat!(Additional, "203.1", "2031", "Presidential Regime: Positive"),
    cat!(Additional, "203.2", "2032", "Republic: Positive"),
    cat!(Additional, "203.3", "2033", "Checks and Balances: Positive"),
    cat!(Additional, "204.1", "2041", "Monarchy: Positive"),
    cat!(Additional, "301.1", "3011", "Republican Powers: Positive"),
    cat!(Additional, "305.1", "3051", "Public Situation: Negative"),
    cat!(Additional, "305.2", "3052", "Communist: Positive"),
    cat!(Additional, "305.3", "3053", "Communist: Negative"),
    cat!(Additional, "305.4", "3054", "Rehabilitation and Compensation: Positive"),
    cat!(Additional, "305.5", "3055", "Political Coalitions: Positive"),
    cat!(Additional, "401.1", "4011", "Privatisation: Positive"),
    cat!(Additional, "401.2", "4012", "Control of Economy: Negative"),
    cat!(Additional, "401.3", "4013", "Property-Restitution: Positive"),
    cat!(Additional, "401.4", "4014", "Privatisation Vouchers: Positive"),
    cat!(Additional, "412.1", "4121", "Social Ownership: Positive"),
    cat!(Additional, "412.2", "4122", "Mixed Economy: Positive"),
    cat!(Additional, "412.3", "4123", "Publicly-Owned Industry: Positive"),
    cat!(Additional, "412.4", "4124", "Socialist Property: Positive"),
    cat!(Additional, "413.1", "4131", "Property-Restitution: Negative"),
    cat!(Additional, "413.2", "4132", "Privatisation: Negative"),
    cat!(Additional, "502.1", "5021", "Private-Public Mix in Culture: Positive"),
    cat!(Additional, "503.1", "5031", "Private-Public Mix in Social Justice: Positive"),
    cat!(Additional, "504.1", "5041", "Private-Public Mix in Welfare: Positive"),
    cat!(Additional, "506.1", "5061", "Private-Public Mix in Education: Positive"),
    cat!(Additional, "601.1", "6011", "The Karabakh Issue: Positive"),
    cat!(Additional, "601.2", "6012", "Rebuilding the USSR: Positive"),
    cat!(Additional, "601.3", "6013", "National Security: Positive"),
    cat!(Additional, "601.4", "6014", "Cyprus Issue"),
    cat!(Additional, "606.1", "6061", "General Crisis"),
    cat!(Additional, "607.1", "6071", "Cultural Autonomy: Positive"),
    cat!(Additional, "607.2", "6072", "Multiculturalism pro Roma: Positive"),
    cat!(Additional, "608.1", "6081", "Multiculturalism against Roma: Negative"),
    cat!(Additional, "705.1", "7051", "Minorities Inland: Positive"),
    cat!(Additional, "705.2", "7052", "Minorities Abroad: Positive"),
    cat!(Additional, "706.1", "7061", "War Participants: Positive"),
    cat!(Additional, "706.2", "7062", "Refugees: Positive"),
];

pub static ALIASES: [CodeAlias; 1] = [CodeAlias {
    alias: "406.1",
    canonical: "416.1",
    note: "406.1 appears in some category lists under the name of 416 \
           (Anti-Growth Economy: Positive); truncation would wrongly roll it \
           up to 406 (Protectionism: Positive), so it is rewritten to 416.1",
}];

/// Names of the standard RILE right and left lists, resolved to codes.
pub static RILE_LISTS: [RileListEntry; 27] = [
    rl("Military: Positive", "104", RileClass::Right, None),
    rl("Freedom", "201.1", RileClass::Right, Some("subcategory of 201")),
    rl("Human Rights", "201.2", RileClass::Right, Some("subcategory of 201")),
    rl("Constitutionalism: Positive", "203", RileClass::Right, None),
    rl("Political Authority", "305", RileClass::Right, None),
    rl("Free Enterprise", "401", RileClass::Right, Some("Free Market Economy")),
    rl("Economic Incentives", "402", RileClass::Right, Some("Incentives: Positive")),
    rl("Protectionism: Negative", "407", RileClass::Right, None),
    rl("Economic Orthodoxy", "414", RileClass::Right, None),
    rl("Social Services Limitation", "505", RileClass::Right, Some("Welfare State Limitation")),
    rl("National Way of Life: Positive", "601", RileClass::Right, None),
    rl("Traditional Morality: Positive", "603", RileClass::Right, None),
    rl("Law and Order", "605", RileClass::Right, None),
    rl("Social Harmony", "606", RileClass::Right, Some("Civic Mindedness: Positive")),
    rl(
        "Decolonisation, Anti-imperialism",
        "103",
        RileClass::Left,
        Some("a single category, Anti-Imperialism"),
    ),
    rl("Military: Negative", "105", RileClass::Left, None),
    rl("Peace", "106", RileClass::Left, None),
    rl("Internationalism: Positive", "107", RileClass::Left, None),
    rl("Democracy", "202", RileClass::Left, None),
    rl(
        "Regulate Capitalism, Market",
        "403",
        RileClass::Left,
        Some("a single category, Market Regulation"),
    ),
    rl("Economic Planning", "404", RileClass::Left, None),
    rl("Protectionism: Positive", "406", RileClass::Left, None),
    rl("Controlled Economy", "412", RileClass::Left, None),
    rl("Nationalisation", "413", RileClass::Left, None),
    rl("Social Services: Expansion", "504", RileClass::Left, Some("Welfare State Expansion")),
    rl("Education: Expansion", "506", RileClass::Left, Some("Education Expansion")),
    rl("Labour Groups: Positive", "701", RileClass::Left, None),
];

const fn rl(
    name: &'static str,
    code: &'static str,
    class: RileClass,
    note: Option<&'static str>,
) -> RileListEntry {
    RileListEntry {
        name,
        code,
        class,
        note,
    }
}

/// Right-set major codes of the standard RILE scale.
pub const RILE_RIGHT: [&str; 13] = [
    "104", "201", "203", "305", "401", "402", "407", "414", "505", "601", "603", "605", "606",
];

/// Left-set major codes of the standard RILE scale.
pub const RILE_LEFT: [&str; 13] = [
    "103", "105", "106", "107", "202", "403", "404", "406", "412", "413", "504", "506", "701",
];

/// All catalogue entries whose canonical code is `code`. Shared dotted codes
/// return one entry per scheme.
pub fn lookup(code: &str) -> impl Iterator<Item = &'static CategoryInfo> + '_ {
    CATEGORIES.iter().filter(move |c| c.code == code)
}

pub fn is_registered(code: &str) -> bool {
    lookup(code).next().is_some()
}

/// Resolves an alias or a four-digit catalogue id to a canonical code.
pub(crate) fn canonicalize(raw: &str) -> Option<&'static str> {
    if let Some(entry) = CATEGORIES.iter().find(|c| c.code == raw) {
        return Some(entry.code);
    }
    if let Some(alias) = ALIASES.iter().find(|a| a.alias == raw) {
        return Some(alias.canonical);
    }
    CATEGORIES
        .iter()
        .find(|c| c.kind == CategoryKind::Additional && c.catalogue_id == raw)
        .map(|c| c.code)
}

/// Distinct canonical codes in catalogue order.
pub fn canonical_codes() -> Vec<&'static str> {
    let mut seen = std::collections::BTreeSet::new();
    CATEGORIES
        .iter()
        .filter(|c| seen.insert(c.code))
        .map(|c| c.code)
        .collect()
}

/// Serializable snapshot of the registry for `registry --dump`.
#[derive(Debug, Serialize)]
pub struct RegistryDump {
    pub categories: &'static [CategoryInfo],
    pub aliases: &'static [CodeAlias],
    pub rile_lists: &'static [RileListEntry],
    pub scale: super::RileScale,
}

pub fn dump() -> RegistryDump {
    RegistryDump {
        categories: &CATEGORIES,
        aliases: &ALIASES,
        rile_lists: &RILE_LISTS,
        scale: super::RileScale::standard(),
    }
}
