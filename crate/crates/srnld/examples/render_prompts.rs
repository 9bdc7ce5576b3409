//! Render the three prompt variants (plain, raw structure, description)
//! under both strategies for one record.
//!
//! ```bash
//! cargo run --example render_prompts
//! ```

use srnld::nld::SrKind;
use srnld::promptkit::{
    render_prompt, PromptSpec, Strategy, Task, TaskRecord, TemplateStore, Variant,
};

fn main() {
    let store = TemplateStore::bundled();
    let record = TaskRecord {
        id: "demo".into(),
        task: Some(Task::Paws),
        input_text: "Sentence 1: John saw a dog.\nSentence 2: A dog was seen by John.".into(),
        sr_kind: Some(SrKind::Amr),
        sr_text: Some("(s / see-01 :ARG0 (p / person) :ARG1 (d / dog))".into()),
        nld_text: Some(
            "The agent of see-01 is person and also the patient of see-01 is dog.".into(),
        ),
        gold: Some("yes".into()),
    };

    for variant in [Variant::Base, Variant::Sr, Variant::SrNld] {
        for strategy in [Strategy::Cot, Strategy::OneShot] {
            let spec = PromptSpec {
                task: Task::Paws,
                variant,
                strategy,
                sr_kind: Some(SrKind::Amr),
            };
            let prompt = render_prompt(&spec, &record, &store).unwrap();
            println!("==== {variant} / {strategy} ====");
            println!("{prompt}\n");
        }
    }
}
