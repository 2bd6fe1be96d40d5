//! Records LLM traffic during library generation and replays it offline.
//! With COMPGEN_LLM_API_KEY set the recording comes from the live endpoint
//! (first category only); otherwise the template client stands in.
//!
//! cargo run --example llm_fixture

use compgen::assets::generate_library;
use compgen::assets::llm::{FixtureClient, HttpLlmClient, LlmClient, RecordingClient, TemplateClient};

fn record<C: LlmClient>(inner: C, categories: &[String]) -> (compgen::assets::AssetLibrary, compgen::assets::llm::Fixture) {
    let recorder = RecordingClient::new(inner);
    let library = generate_library(categories, &recorder, 3).expect("generation succeeds");
    (library, recorder.fixture())
}

fn main() {
    let live = std::env::var("COMPGEN_LLM_API_KEY").is_ok_and(|k| !k.is_empty());
    let categories: Vec<String> = if live {
        vec![compgen::assets::CATEGORIES[0].to_string()]
    } else {
        compgen::assets::CATEGORIES.iter().map(|c| c.to_string()).collect()
    };
    let (library, fixture) = if live {
        record(HttpLlmClient::from_env(4).expect("endpoint configured"), &categories)
    } else {
        record(TemplateClient, &categories)
    };
    println!("recorded {} distinct prompts, {} objects", fixture.entries.len(), library.objects.len());

    let path = std::env::temp_dir().join("compgen_fixture.json");
    fixture.save(&path).expect("fixture written");
    let replay = FixtureClient::load(&path).expect("fixture readable");
    let again = generate_library(&categories, &replay, 3).expect("replay covers every prompt");
    println!("replayed library identical: {}", again == library);
    println!("fixture at {}", path.display());
}
