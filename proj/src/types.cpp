#include "phq/types.hpp"

namespace phq {

std::string to_string(Gender g) {
    switch (g) {
        case Gender::Male: return "male";
        case Gender::Female: return "female";
        default: return "other";
    }
}

std::string to_string(Task t) {
    switch (t) {
        case Task::Phoneme: return "phoneme";
        case Task::PhonemicFluency: return "phonemic_fluency";
        case Task::PictureDescription: return "picture_description";
        case Task::SemanticFluency: return "semantic_fluency";
        case Task::PromptedNarrative: return "prompted_narrative";
    }
    return "phoneme";
}

Gender gender_from_string(const std::string& s) {
    if (s == "male" || s == "m") return Gender::Male;
    if (s == "female" || s == "f") return Gender::Female;
    if (s == "other" || s == "unknown" || s.empty()) return Gender::Other;
    throw FormatError("unrecognized gender value: '" + s + "'");
}

Task task_from_string(const std::string& s) {
    for (Task t : all_tasks())
        if (to_string(t) == s) return t;
    throw FormatError("unrecognized task value: '" + s + "'");
}

const std::vector<Task>& all_tasks() {
    static const std::vector<Task> tasks = {
        Task::Phoneme, Task::PhonemicFluency, Task::PictureDescription,
        Task::SemanticFluency, Task::PromptedNarrative};
    return tasks;
}

} // namespace phq
