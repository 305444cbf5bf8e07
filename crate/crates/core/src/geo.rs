//! Bundled table of U.S. states and territories with capital-city coordinates.
//!
//! Coordinates are only used to place nodes when the reprint network is
//! rendered; no analysis depends on them.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateInfo {
    pub name: &'static str,
    pub code: &'static str,
    pub capital: &'static str,
    pub lat: f64,
    pub lon: f64,
}

macro_rules! st {
    ($name:expr, $code:expr, $cap:expr, $lat:expr, $lon:expr) => {
        StateInfo { name: $name, code: $code, capital: $cap, lat: $lat, lon: $lon }
    };
}

pub const STATES: &[StateInfo] = &[
    st!("Alabama", "AL", "Montgomery", 32.3777, -86.3006),
    st!("Alaska", "AK", "Juneau", 58.3019, -134.4197),
    st!("Arizona", "AZ", "Phoenix", 33.4484, -112.0740),
    st!("Arkansas", "AR", "Little Rock", 34.7465, -92.2896),
    st!("California", "CA", "Sacramento", 38.5816, -121.4944),
    st!("Colorado", "CO", "Denver", 39.7392, -104.9903),
    st!("Connecticut", "CT", "Hartford", 41.7658, -72.6734),
    st!("Delaware", "DE", "Dover", 39.1582, -75.5244),
    st!("District of Columbia", "DC", "Washington", 38.9072, -77.0369),
    st!("Florida", "FL", "Tallahassee", 30.4383, -84.2807),
    st!("Georgia", "GA", "Atlanta", 33.7490, -84.3880),
    st!("Hawaii", "HI", "Honolulu", 21.3069, -157.8583),
    st!("Idaho", "ID", "Boise", 43.6150, -116.2023),
    st!("Illinois", "IL", "Springfield", 39.7817, -89.6501),
    st!("Indiana", "IN", "Indianapolis", 39.7684, -86.1581),
    st!("Iowa", "IA", "Des Moines", 41.5868, -93.6250),
    st!("Kansas", "KS", "Topeka", 39.0473, -95.6752),
    st!("Kentucky", "KY", "Frankfort", 38.2009, -84.8733),
    st!("Louisiana", "LA", "Baton Rouge", 30.4515, -91.1871),
    st!("Maine", "ME", "Augusta", 44.3106, -69.7795),
    st!("Maryland", "MD", "Annapolis", 38.9784, -76.4922),
    st!("Massachusetts", "MA", "Boston", 42.3601, -71.0589),
    st!("Michigan", "MI", "Lansing", 42.7325, -84.5555),
    st!("Minnesota", "MN", "Saint Paul", 44.9537, -93.0900),
    st!("Mississippi", "MS", "Jackson", 32.2988, -90.1848),
    st!("Missouri", "MO", "Jefferson City", 38.5767, -92.1735),
    st!("Montana", "MT", "Helena", 46.5891, -112.0391),
    st!("Nebraska", "NE", "Lincoln", 40.8136, -96.7026),
    st!("Nevada", "NV", "Carson City", 39.1638, -119.7674),
    st!("New Hampshire", "NH", "Concord", 43.2081, -71.5376),
    st!("New Jersey", "NJ", "Trenton", 40.2206, -74.7597),
    st!("New Mexico", "NM", "Santa Fe", 35.6870, -105.9378),
    st!("New York", "NY", "Albany", 42.6526, -73.7562),
    st!("North Carolina", "NC", "Raleigh", 35.7796, -78.6382),
    st!("North Dakota", "ND", "Bismarck", 46.8083, -100.7837),
    st!("Ohio", "OH", "Columbus", 39.9612, -82.9988),
    st!("Oklahoma", "OK", "Oklahoma City", 35.4676, -97.5164),
    st!("Oregon", "OR", "Salem", 44.9429, -123.0351),
    st!("Pennsylvania", "PA", "Harrisburg", 40.2732, -76.8867),
    st!("Rhode Island", "RI", "Providence", 41.8240, -71.4128),
    st!("South Carolina", "SC", "Columbia", 34.0007, -81.0348),
    st!("South Dakota", "SD", "Pierre", 44.3683, -100.3510),
    st!("Tennessee", "TN", "Nashville", 36.1627, -86.7816),
    st!("Texas", "TX", "Austin", 30.2672, -97.7431),
    st!("Utah", "UT", "Salt Lake City", 40.7608, -111.8910),
    st!("Vermont", "VT", "Montpelier", 44.2601, -72.5754),
    st!("Virginia", "VA", "Richmond", 37.5407, -77.4360),
    st!("Washington", "WA", "Olympia", 47.0379, -122.9007),
    st!("West Virginia", "WV", "Charleston", 38.3498, -81.6326),
    st!("Wisconsin", "WI", "Madison", 43.0731, -89.4012),
    st!("Wyoming", "WY", "Cheyenne", 41.1400, -104.8202),
    st!("Puerto Rico", "PR", "San Juan", 18.4655, -66.1057),
    st!("Virgin Islands", "VI", "Charlotte Amalie", 18.3419, -64.9307),
];

/// Looks a state up by its full name, case-insensitively.
pub fn lookup(name: &str) -> Option<&'static StateInfo> {
    let name = name.trim();
    STATES.iter().find(|s| s.name.eq_ignore_ascii_case(name))
}

/// Short code used to tag per-state keyword tokens. Unknown names fall back
/// to their alphanumeric characters, uppercased.
pub fn state_code(name: &str) -> String {
    match lookup(name) {
        Some(info) => info.code.to_string(),
        None => name.chars().filter(|c| c.is_alphanumeric()).flat_map(char::to_uppercase).collect(),
    }
}

/// Capital coordinates as `(lat, lon)`, if the state is in the bundled table.
pub fn capital_coordinates(name: &str) -> Option<(f64, f64)> {
    lookup(name).map(|s| (s.lat, s.lon))
}
