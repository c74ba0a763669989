//! Word lists for synthetic corpora. Person names, filler names and brand
//! names use pairwise disjoint tokens, so only intended identities can ever
//! name-match a queried user.

pub const FIRST_NAMES: &[&str] = &[
    "Aaron", "Abigail", "Adrian", "Alice", "Amara", "Andrea", "Angela", "Arjun", "Beatrice",
    "Benjamin", "Bianca", "Bruno", "Caleb", "Camila", "Carlos", "Chloe", "Clara", "Colin",
    "Daniel", "Daria", "David", "Diana", "Dmitri", "Eamon", "Elena", "Elias", "Emily", "Ethan",
    "Fatima", "Felix", "Fiona", "Gabriel", "Grace", "Hannah", "Hector", "Helena", "Hiro",
    "Ingrid", "Isaac", "Isabel", "Ivan", "Jasmine", "Javier", "Jonah", "Julia", "Kamal", "Karen",
    "Keiko", "Kevin", "Laila", "Laura", "Leon", "Lucas", "Lydia", "Malik", "Marco", "Maria",
    "Martha", "Mateo", "Megan", "Mira", "Nadia", "Naomi", "Nathan", "Nikhil", "Nora", "Oliver",
    "Omar", "Oscar", "Paula", "Pedro", "Priya", "Rafael", "Rahul", "Rebecca", "Rosa", "Ruben",
    "Sakura", "Samuel", "Sara", "Selim", "Sofia", "Stefan", "Tamar", "Thomas", "Tobias", "Uma",
    "Valeria", "Victor", "Wendy", "Xavier", "Yara", "Yusuf", "Zara", "Zoran",
];

pub const LAST_NAMES: &[&str] = &[
    "Abbott", "Acosta", "Adeyemi", "Alvarez", "Andersen", "Baker", "Banerjee", "Barros",
    "Becker", "Bennett", "Bishop", "Brennan", "Castillo", "Chandra", "Chen", "Costa", "Cruz",
    "Dalton", "Delgado", "Desai", "Dubois", "Duarte", "Eriksen", "Esposito", "Farah", "Fischer",
    "Fleming", "Fonseca", "Garcia", "Gupta", "Haddad", "Hansen", "Hartley", "Herrera", "Huang",
    "Ibrahim", "Iyer", "Jensen", "Joshi", "Kapoor", "Keller", "Kimura", "Kowalski", "Larsen",
    "Lindqvist", "Lopez", "Malhotra", "Marino", "Medina", "Mendes", "Moreau", "Morgan",
    "Nakamura", "Navarro", "Nielsen", "Novak", "Okafor", "Olsen", "Ortiz", "Patel", "Pereira",
    "Petrov", "Quinn", "Ramirez", "Reyes", "Richter", "Rossi", "Saito", "Santos", "Schmidt",
    "Sharma", "Silva", "Sokolov", "Suzuki", "Tanaka", "Torres", "Turner", "Varga", "Vasquez",
    "Verma", "Wagner", "Walsh", "Weber", "Wong", "Yamada", "Zhang", "Zimmer",
];

pub const FILLER_FIRST: &[&str] = &[
    "Quorra", "Talvin", "Brisk", "Corvo", "Dunmore", "Eskel", "Fenwick", "Gorrim", "Halvar",
    "Ildra", "Jorvik", "Kestrel", "Lorcan", "Murrow", "Nyssa", "Orrin", "Pell", "Quillon",
    "Rurik", "Saffa", "Thorne", "Ulric", "Vesna", "Wystan", "Yorick", "Zephyr",
];

pub const FILLER_LAST: &[&str] = &[
    "Ashgrove", "Blackwood", "Coldwater", "Dunhollow", "Emberly", "Frostmere", "Greyhaven",
    "Hollowell", "Ironside", "Jasperly", "Kingsley", "Larkspur", "Mossfield", "Northam",
    "Oakhurst", "Pinecrest", "Quarrytown", "Ravensworth", "Stonebridge", "Thornbury",
    "Underhill", "Valecroft", "Westbrook", "Yarrowdale",
];

pub const BRANDS: &[&str] = &[
    "Harbor Coffee", "Nimbus Gear", "Kettle Bakery", "Orbit Tickets", "Velvet Radio",
    "Summit Bikes", "Copper Kitchen", "Lantern Books", "Tidal Surf", "Marble Gym",
];

/// No city contains another as a substring (location matching is by
/// containment).
pub const CITIES: &[&str] = &[
    "Springfield", "Riverton", "Lakewood", "Fairview", "Brookside", "Ashford", "Milltown",
    "Oakridge",
];

pub const REGIONS: &[&str] = &["North County", "East Valley", "West Coast", "Midlands"];

pub const HANDLE_WORDS: &[&str] = &[
    "pixel", "rocket", "mango", "ember", "quartz", "nova", "drift", "cactus", "violet", "panda",
    "thunder", "maple", "cobalt", "sprout", "falcon", "gizmo", "lunar", "tango", "zigzag",
    "biscuit", "comet", "walrus", "saffron", "jelly",
];

pub const WORDS: &[&str] = &[
    "morning", "coffee", "train", "late", "again", "sunset", "beach", "weekend", "finally",
    "friday", "meeting", "lunch", "dinner", "pizza", "music", "concert", "tickets", "game",
    "match", "goal", "season", "rain", "snow", "summer", "winter", "holiday", "flight",
    "airport", "hotel", "road", "trip", "city", "park", "walk", "dog", "cat", "garden",
    "flowers", "book", "reading", "movie", "cinema", "series", "episode", "coding", "project",
    "deadline", "exam", "class", "lecture", "library", "gym", "running", "marathon", "bike",
    "ride", "market", "fresh", "bread", "cake", "birthday", "party", "friends", "family",
    "mother", "brother", "sister", "cousin", "wedding", "photos", "camera", "lights", "night",
    "sleep", "tired", "happy", "excited", "bored", "busy", "quiet", "loud", "new", "old",
    "favorite", "best", "worst", "great", "amazing", "terrible", "today", "tomorrow",
    "yesterday", "always", "never", "really", "totally", "maybe", "soon", "home", "office",
    "work", "school", "street", "bus", "traffic", "weather", "sky", "moon", "stars", "ocean",
    "river", "mountain", "hike", "view", "breakfast", "tea", "juice", "soup", "salad", "noodles",
    "burger", "recipe", "kitchen", "paint", "draw", "song", "guitar", "piano", "dance", "shoes",
    "jacket", "sale", "shopping", "phone", "laptop", "update", "news", "story", "podcast",
];

pub const QUOTES: &[&str] = &[
    "Be yourself; everyone else is already taken.",
    "In the middle of difficulty lies opportunity.",
    "Life is what happens when you are busy making other plans.",
    "The only way to do great work is to love what you do.",
    "Not all those who wander are lost.",
];

pub const APPS: &[&str] = &["web", "mobile", "tablet", "scheduler"];
