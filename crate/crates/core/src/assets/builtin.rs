//! Offline asset library: 50 objects in each of the ten categories, one 5x5
//! attribute catalog per category, and rule-based relation predicates keyed on
//! the category pair.

use std::collections::BTreeMap;

use super::{AssetLibrary, AttributeCatalog, AttributeConcept, ObjectAsset, CATEGORIES};

pub const BUILTIN_OBJECTS_PER_CATEGORY: usize = 50;

const OBJECTS: [[&str; 50]; 10] = [
    [
        "mountain", "river", "lake", "waterfall", "desert", "forest", "beach", "volcano",
        "glacier", "canyon", "valley", "meadow", "cliff", "island", "ocean", "hill", "cave",
        "swamp", "prairie", "sand dune", "coral reef", "lagoon", "geyser", "fjord", "plateau",
        "marsh", "creek", "pond", "iceberg", "savanna", "tundra", "jungle", "oasis",
        "river delta", "bay", "peninsula", "rainbow", "boulder", "hot spring", "rock arch",
        "crater", "gorge", "mesa", "ridge", "snowfield", "bamboo grove", "wetland", "riverbank",
        "seashore", "foothill",
    ],
    [
        "traffic light", "street lamp", "fire hydrant", "manhole cover", "bus stop",
        "crosswalk", "bridge", "skyscraper", "road sign", "parking meter", "mailbox",
        "trash can", "park bench", "fountain", "sidewalk", "tunnel", "overpass", "billboard",
        "statue", "phone booth", "traffic cone", "guardrail", "street sign", "bike rack",
        "utility pole", "water tower", "clock tower", "office building", "apartment block",
        "storefront", "subway entrance", "railway crossing", "parking garage", "roundabout",
        "speed bump", "newsstand", "bollard", "drain grate", "scaffolding", "vendor cart",
        "awning", "gate", "fence", "brick wall", "staircase", "escalator", "ticket machine",
        "flagpole", "monument", "lighthouse",
    ],
    [
        "man", "woman", "boy", "girl", "baby", "toddler", "teenager", "old man", "old woman",
        "chef", "doctor", "nurse", "firefighter", "police officer", "farmer", "teacher",
        "student", "athlete", "soldier", "pilot", "sailor", "painter", "musician", "dancer",
        "clown", "astronaut", "construction worker", "mail carrier", "waiter", "scientist",
        "photographer", "cowboy", "knight", "bride", "groom", "runner", "swimmer", "skier",
        "surfer", "hiker", "tourist", "businessman", "gardener", "mechanic", "baker",
        "fisherman", "lifeguard", "jogger", "guitarist", "magician",
    ],
    [
        "dog", "cat", "horse", "cow", "sheep", "pig", "goat", "chicken", "duck", "rabbit",
        "elephant", "lion", "tiger", "bear", "zebra", "giraffe", "monkey", "kangaroo", "panda",
        "fox", "wolf", "deer", "owl", "eagle", "parrot", "penguin", "dolphin", "whale", "shark",
        "turtle", "frog", "snake", "crocodile", "camel", "hippo", "rhino", "squirrel", "mouse",
        "hamster", "goldfish", "butterfly", "bee", "ladybug", "swan", "flamingo", "peacock",
        "koala", "hedgehog", "octopus", "seal",
    ],
    [
        "rose", "sunflower", "tulip", "daisy", "lily", "orchid", "cactus", "fern", "oak tree",
        "pine tree", "palm tree", "maple tree", "willow tree", "bamboo", "ivy", "moss",
        "lavender", "dandelion", "lotus", "bonsai", "aloe vera", "succulent", "bush", "hedge",
        "vine", "clover", "poppy", "marigold", "hibiscus", "magnolia", "cherry blossom",
        "birch tree", "cypress", "sapling", "tumbleweed", "lilac", "peony", "carnation",
        "daffodil", "iris", "water lily", "venus flytrap", "mushroom", "wheat stalk",
        "corn plant", "tomato plant", "basil plant", "seaweed", "grass tuft", "shrub",
    ],
    [
        "apple", "banana", "orange", "pizza", "hamburger", "sandwich", "hot dog", "cake",
        "cookie", "donut", "ice cream", "coffee", "tea", "orange juice", "milk", "bread",
        "cheese", "egg", "salad", "soup", "sushi", "pasta", "steak", "taco", "burrito",
        "pancake", "waffle", "croissant", "muffin", "cupcake", "watermelon", "strawberry",
        "grape bunch", "pineapple", "lemon", "carrot", "broccoli", "tomato", "potato",
        "corn cob", "popcorn", "pretzel", "chocolate bar", "lemonade", "smoothie", "soda can",
        "milkshake", "french fries", "fried chicken", "noodle bowl",
    ],
    [
        "soccer ball", "basketball", "football", "baseball bat", "tennis racket", "golf club",
        "hockey stick", "skateboard", "surfboard", "snowboard", "ski", "dumbbell", "barbell",
        "kettlebell", "yoga mat", "jump rope", "treadmill", "exercise bike", "boxing glove",
        "punching bag", "volleyball", "tennis ball", "baseball glove", "helmet", "trophy",
        "medal", "whistle", "stopwatch", "goal post", "basketball hoop", "ping pong paddle",
        "badminton racket", "shuttlecock", "bowling ball", "bowling pin", "frisbee",
        "rowing machine", "climbing rope", "swim goggles", "running shoe", "rugby ball",
        "cricket bat", "dartboard", "archery bow", "archery target", "hurdle", "balance beam",
        "trampoline", "medicine ball", "sports bag",
    ],
    [
        "laptop", "smartphone", "tablet", "desktop computer", "monitor", "keyboard",
        "computer mouse", "printer", "camera", "headphones", "microphone", "speaker",
        "television", "router", "server rack", "robot", "drone", "satellite dish",
        "solar panel", "wind turbine", "forklift", "crane", "conveyor belt", "generator",
        "oscilloscope", "soldering iron", "circuit board", "hard drive", "projector", "scanner",
        "game console", "smartwatch", "calculator", "telescope", "microscope", "3d printer",
        "welding torch", "power drill", "chainsaw", "bulldozer", "excavator", "lathe",
        "control panel", "battery", "cable reel", "antenna", "radio", "walkie talkie",
        "vr headset", "security camera",
    ],
    [
        "chair", "table", "cup", "mug", "plate", "bowl", "spoon", "fork", "knife", "book",
        "pen", "pencil", "clock", "lamp", "pillow", "blanket", "umbrella", "backpack", "wallet",
        "key", "scissors", "toothbrush", "towel", "mirror", "vase", "candle", "basket",
        "bottle", "teapot", "sofa", "bed", "shoe", "hat", "glasses", "broom", "bucket", "rug",
        "picture frame", "notebook", "envelope", "box", "jar", "comb", "painting",
        "alarm clock", "coat hanger", "doormat", "trash bag", "teddy bear", "kettle",
    ],
    [
        "car", "bus", "truck", "bicycle", "motorcycle", "train", "airplane", "helicopter",
        "boat", "ship", "sailboat", "canoe", "kayak", "scooter", "taxi", "ambulance",
        "fire truck", "police car", "tram", "subway train", "van", "jeep", "tractor",
        "limousine", "hot air balloon", "rocket", "submarine", "yacht", "ferry", "cable car",
        "golf cart", "unicycle", "tricycle", "rickshaw", "horse carriage", "sled", "snowmobile",
        "jet ski", "pickup truck", "school bus", "double decker bus", "cargo plane", "glider",
        "blimp", "gondola", "segway", "camper van", "race car", "tow truck", "delivery truck",
    ],
];

type Catalog = [(&'static str, [&'static str; 5]); 5];

const CATALOGS: [Catalog; 10] = [
    [
        ("color", ["green", "brown", "white", "blue", "golden"]),
        ("size", ["small", "vast", "narrow", "wide", "towering"]),
        ("weather", ["sunny", "cloudy", "snowy", "foggy", "stormy"]),
        ("time of day", ["dawn", "noon", "dusk", "night", "morning"]),
        ("texture", ["rocky", "sandy", "grassy", "icy", "muddy"]),
    ],
    [
        ("color", ["gray", "red", "yellow", "black", "white"]),
        ("material", ["concrete", "steel", "brick", "glass", "wooden"]),
        ("size", ["small", "tall", "wide", "narrow", "large"]),
        ("condition", ["new", "old", "rusty", "cracked", "clean"]),
        ("shape", ["square", "round", "rectangular", "curved", "arched"]),
    ],
    [
        ("clothing color", ["red", "blue", "green", "black", "white"]),
        ("hair color", ["blonde", "brown", "black", "ginger", "gray"]),
        ("pose", ["standing", "sitting", "walking", "running", "kneeling"]),
        ("expression", ["smiling", "laughing", "serious", "surprised", "frowning"]),
        ("clothing pattern", ["striped", "plaid", "floral", "plain", "dotted"]),
    ],
    [
        ("color", ["brown", "black", "white", "gray", "yellow"]),
        ("size", ["small", "medium", "large", "tiny", "huge"]),
        ("pose", ["sitting", "standing", "lying", "running", "jumping"]),
        ("pattern", ["striped", "spotted", "plain", "patched", "speckled"]),
        ("age", ["baby", "young", "adult", "old", "juvenile"]),
    ],
    [
        ("color", ["green", "red", "yellow", "purple", "orange"]),
        ("size", ["small", "tall", "short", "large", "tiny"]),
        ("shape", ["round", "spiky", "bushy", "slender", "drooping"]),
        ("growth stage", ["seedling", "budding", "blooming", "mature", "wilting"]),
        ("leaf type", ["broad", "narrow", "needle", "waxy", "fuzzy"]),
    ],
    [
        ("color", ["red", "green", "yellow", "brown", "golden"]),
        ("temperature", ["hot", "cold", "steaming", "frozen", "warm"]),
        ("portion", ["small", "large", "sliced", "whole", "half"]),
        ("freshness", ["fresh", "ripe", "stale", "burnt", "raw"]),
        ("texture", ["crispy", "creamy", "juicy", "crunchy", "fluffy"]),
    ],
    [
        ("color", ["red", "blue", "white", "black", "orange"]),
        ("material", ["leather", "rubber", "metal", "plastic", "wooden"]),
        ("size", ["small", "large", "mini", "oversized", "standard"]),
        ("condition", ["new", "worn", "dirty", "shiny", "scuffed"]),
        ("pattern", ["striped", "plain", "checkered", "dotted", "logo-printed"]),
    ],
    [
        ("color", ["black", "silver", "white", "gray", "blue"]),
        ("material", ["metal", "plastic", "glass", "aluminum", "carbon"]),
        ("size", ["small", "large", "compact", "portable", "massive"]),
        ("state", ["powered", "unplugged", "glowing", "blinking", "dark"]),
        ("shape", ["square", "round", "rectangular", "slim", "bulky"]),
    ],
    [
        ("color", ["red", "blue", "green", "yellow", "black"]),
        ("material", ["wooden", "plastic", "metal", "glass", "ceramic"]),
        ("size", ["small", "large", "tiny", "medium", "oversized"]),
        ("shape", ["round", "square", "oval", "rectangular", "triangular"]),
        ("condition", ["new", "old", "broken", "clean", "dusty"]),
    ],
    [
        ("color", ["red", "blue", "white", "black", "yellow"]),
        ("size", ["small", "compact", "large", "huge", "long"]),
        ("material", ["metal", "wooden", "fiberglass", "steel", "carbon"]),
        ("condition", ["new", "old", "rusty", "shiny", "dented"]),
        ("style", ["modern", "vintage", "sporty", "classic", "futuristic"]),
    ],
];

pub(crate) fn category_index(category: &str) -> Option<usize> {
    CATEGORIES.iter().position(|c| *c == category)
}

pub(crate) fn category_objects(category: &str) -> Option<Vec<&'static str>> {
    category_index(category).map(|i| OBJECTS[i].to_vec())
}

fn object_category(name: &str) -> Option<usize> {
    OBJECTS.iter().position(|names| names.contains(&name))
}

fn catalog_of(category: usize) -> Vec<AttributeConcept> {
    CATALOGS[category]
        .iter()
        .map(|(concept, values)| AttributeConcept {
            name: concept.to_string(),
            values: values.iter().map(|v| v.to_string()).collect(),
        })
        .collect()
}

pub(crate) fn catalog_for(object: &str) -> Option<Vec<AttributeConcept>> {
    object_category(object).map(catalog_of)
}

const NATURAL: usize = 0;
const CITY: usize = 1;
const PEOPLE: usize = 2;
const ANIMALS: usize = 3;
const PLANTS: usize = 4;
const FOOD: usize = 5;
const SPORTS: usize = 6;
const TECH: usize = 7;
const EVERYDAY: usize = 8;
const TRANSPORT: usize = 9;

const DEFAULT_PREDICATES: &[&str] = &["next to", "near", "beside", "behind", "in front of", "above"];

fn predicates(subject: Option<usize>, object: Option<usize>) -> &'static [&'static str] {
    let (Some(s), Some(o)) = (subject, object) else {
        return DEFAULT_PREDICATES;
    };
    match (s, o) {
        (PEOPLE, EVERYDAY) => &["holding", "using", "standing beside"],
        (PEOPLE, FOOD) => &["eating", "holding", "reaching for"],
        (PEOPLE, ANIMALS) => &["petting", "feeding", "walking beside"],
        (PEOPLE, TRANSPORT) => &["riding", "standing beside", "waving at"],
        (PEOPLE, SPORTS) => &["holding", "carrying", "using"],
        (PEOPLE, TECH) => &["using", "operating", "looking at"],
        (PEOPLE, PEOPLE) => &["talking to", "standing beside", "facing"],
        (PEOPLE, PLANTS) => &["watering", "standing beside", "looking at"],
        (PEOPLE, NATURAL) => &["standing in front of", "walking toward", "looking at"],
        (PEOPLE, CITY) => &["standing beside", "walking past", "leaning against"],
        (ANIMALS, FOOD) => &["eating", "sniffing", "staring at"],
        (ANIMALS, NATURAL) => &["resting near", "walking toward", "standing in front of"],
        (ANIMALS, ANIMALS) => &["chasing", "facing", "sitting beside"],
        (ANIMALS, PEOPLE) => &["following", "looking at", "sitting beside"],
        (ANIMALS, EVERYDAY) => &["sitting beside", "sniffing", "lying under"],
        (ANIMALS, PLANTS) => &["hiding behind", "sniffing", "resting under"],
        (FOOD, EVERYDAY) => &["on", "inside", "beside"],
        (FOOD, FOOD) => &["next to", "beside", "behind"],
        (EVERYDAY, EVERYDAY) => &["on", "beside", "under"],
        (TRANSPORT, CITY) => &["parked beside", "passing", "in front of"],
        (TRANSPORT, NATURAL) => &["driving toward", "in front of", "crossing"],
        (TRANSPORT, TRANSPORT) => &["behind", "following", "next to"],
        (PLANTS, NATURAL) => &["growing in", "in front of", "beside"],
        (PLANTS, EVERYDAY) => &["in", "beside", "behind"],
        (SPORTS, EVERYDAY) => &["on", "beside", "leaning against"],
        (TECH, EVERYDAY) => &["on", "beside", "behind"],
        (CITY, NATURAL) => &["in front of", "overlooking", "beside"],
        (NATURAL, _) => &["behind", "surrounding", "beyond"],
        _ => DEFAULT_PREDICATES,
    }
}

fn fnv1a(text: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Deterministic predicate for an ordered object pair. Candidates that would
/// repeat a word of either name are skipped.
pub fn builtin_relation(subject: &str, object: &str) -> String {
    let options = predicates(object_category(subject), object_category(object));
    let start = (fnv1a(&format!("{subject}|{object}")) % options.len() as u64) as usize;
    (0..options.len())
        .map(|k| options[(start + k) % options.len()])
        .chain(DEFAULT_PREDICATES.iter().copied())
        .find(|p| super::validate_predicate(p, subject, object).is_ok())
        .unwrap_or("near")
        .to_string()
}

pub fn builtin_library() -> AssetLibrary {
    let mut objects = Vec::with_capacity(OBJECTS.len() * BUILTIN_OBJECTS_PER_CATEGORY);
    let mut catalogs = BTreeMap::new();
    for (ci, names) in OBJECTS.iter().enumerate() {
        for name in names {
            objects.push(ObjectAsset {
                id: objects.len() as u32 + 1,
                name: name.to_string(),
                category: CATEGORIES[ci].to_string(),
            });
            catalogs.insert(
                name.to_string(),
                AttributeCatalog {
                    object: name.to_string(),
                    concepts: catalog_of(ci),
                },
            );
        }
    }
    AssetLibrary {
        categories: CATEGORIES.iter().map(|c| c.to_string()).collect(),
        objects,
        catalogs,
        relations: BTreeMap::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assets::{parse_attribute_response, parse_object_response, validate_predicate};
    use std::collections::BTreeSet;

    #[test]
    fn builtin_is_deterministic() {
        assert_eq!(builtin_library().to_json_pretty(), builtin_library().to_json_pretty());
    }

    #[test]
    fn builtin_shape() {
        let lib = builtin_library();
        assert_eq!(lib.objects.len(), 500);
        assert!(lib.check().is_empty(), "{:?}", lib.check());
        assert_eq!(lib.concept_capacity(), 5);
        let ids: Vec<u32> = lib.objects.iter().map(|o| o.id).collect();
        assert_eq!(ids, (1..=500).collect::<Vec<_>>());
    }

    #[test]
    fn builtin_data_passes_generation_validators() {
        for category in CATEGORIES {
            let names = category_objects(category).unwrap();
            let payload = serde_json::json!({ "objects": names }).to_string();
            parse_object_response(&payload).unwrap();
            let catalog = catalog_for(names[0]).unwrap();
            let list: Vec<_> = catalog
                .iter()
                .map(|c| serde_json::json!({"concept": c.name, "values": c.values}))
                .collect();
            parse_attribute_response(&serde_json::json!({ "concepts": list }).to_string()).unwrap();
        }
        let all: BTreeSet<&str> = OBJECTS.iter().flatten().copied().collect();
        assert_eq!(all.len(), 500, "names must be unique across categories");
    }

    #[test]
    fn every_pair_gets_a_valid_predicate() {
        let names: Vec<&str> = OBJECTS.iter().flatten().copied().collect();
        for (i, s) in names.iter().enumerate() {
            // a stride keeps the check fast while covering all category pairs
            for o in names.iter().skip(i % 7).step_by(7) {
                let p = builtin_relation(s, o);
                assert!(!p.is_empty());
                assert!(validate_predicate(&p, s, o).is_ok(), "{s} {p} {o}");
            }
        }
        assert_eq!(builtin_relation("man", "chair"), builtin_relation("man", "chair"));
    }
}
