#include "elite/task_suite.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <random>
#include <set>

#include "elite/error.hpp"
#include "elite/random.hpp"

namespace elite {

namespace {

enum class Procedure { clean, heat, cool, store };

constexpr std::array kProcedures = {Procedure::clean, Procedure::heat,
                                    Procedure::cool, Procedure::store};

// Kitchen layout, left to right.
const std::vector<std::string>& layout() {
  static const std::vector<std::string> names = {
      "shelf", "counter", "sink", "microwave", "fridge", "table", "cabinet", "drawer"};
  return names;
}

std::vector<Location> kitchen() {
  return {
      {"shelf", false, true, Effect::none, "", false},
      {"counter", false, true, Effect::none, "", false},
      {"sink", false, true, Effect::clean, "faucet", false},
      {"microwave", true, false, Effect::heat, "microwave", false},
      {"fridge", true, false, Effect::cool, "fridge", false},
      {"table", false, true, Effect::none, "", false},
      {"cabinet", true, false, Effect::none, "", false},
      {"drawer", true, false, Effect::none, "", false},
  };
}

const std::vector<std::string> kDishes = {"plate", "mug", "bowl", "spatula", "cloth", "pan"};
const std::vector<std::string> kFoods = {"potato", "apple", "egg", "bread", "tomato", "lettuce"};
const std::vector<std::string> kThings = {"book", "candle", "vase", "keys"};
const std::vector<std::string> kColors = {"red", "blue", "green", "yellow"};

// Plain surfaces and closed storage an object can start on or be delivered to.
const std::vector<std::string> kPlaces = {"shelf", "counter", "table", "cabinet", "drawer"};
const std::vector<std::string> kStorage = {"cabinet", "drawer"};

std::string prep(const std::string& location) {
  static const std::vector<std::string> inside = {"cabinet", "drawer", "fridge",
                                                  "microwave", "sink"};
  return std::find(inside.begin(), inside.end(), location) != inside.end() ? "in"
                                                                            : "on";
}

bool is_food(const std::string& type) {
  return std::find(kFoods.begin(), kFoods.end(), type) != kFoods.end();
}

Object make_object(const std::string& name, const std::string& type,
                   const std::string& at) {
  Object o{name, at, {}};
  if (std::find(kDishes.begin(), kDishes.end(), type) != kDishes.end()) {
    o.attributes["cleanliness"] = "dirty";
  } else if (is_food(type)) {
    o.attributes["temperature"] = "room";
  }
  return o;
}

// One procedure applied to one object.
struct Job {
  Procedure procedure;
  std::string object;  // unique object name
  std::string type;    // noun used in instructions
  std::string source;
  std::string destination;
  std::string color;   // visual tasks only
};

std::vector<Subgoal> goal_for(const Job& job) {
  switch (job.procedure) {
    case Procedure::clean:
      return {{job.object, "cleanliness", "clean"}, {job.object, "at", job.destination}};
    case Procedure::heat:
      return {{job.object, "temperature", "hot"}, {job.object, "at", job.destination}};
    case Procedure::cool:
      return {{job.object, "temperature", "cold"}, {job.object, "at", job.destination}};
    case Procedure::store:
      return {{job.object, "at", job.destination}};
  }
  return {};
}

// Builds the ground-truth action sequence by stepping a scratch environment,
// so open/closed and on/off states carried over between jobs are respected.
class OracleBuilder {
 public:
  explicit OracleBuilder(const WorldState& initial) : state_(initial) {}

  std::vector<Action> build(const std::vector<Job>& jobs) {
    for (const auto& job : jobs) {
      fetch(job.object);
      switch (job.procedure) {
        case Procedure::clean:
          process(job.object, "sink", Skill::clean);
          break;
        case Procedure::heat:
          process(job.object, "microwave", Skill::heat);
          break;
        case Procedure::cool:
          process(job.object, "fridge", Skill::cool);
          break;
        case Procedure::store:
          break;
      }
      deliver(job.object, job.destination);
    }
    return actions_;
  }

 private:
  void emit(Action a) {
    // Mirror the transition locally; the suite test replays every oracle
    // through Env independently.
    auto& agent = state_.agent;
    switch (a.skill) {
      case Skill::go_to:
        agent.at = a.target;
        break;
      case Skill::pick:
        state_.object(a.target)->at.clear();
        agent.holding = a.target;
        break;
      case Skill::place:
        state_.object(a.target)->at = a.destination;
        agent.holding.reset();
        break;
      case Skill::open:
        state_.location(a.target)->open = true;
        break;
      case Skill::close:
        state_.location(a.target)->open = false;
        break;
      case Skill::toggle: {
        const Location* l = state_.location_with_switch(a.target);
        state_.location(l->name)->on = !l->on;
        break;
      }
      default:
        break;
    }
    actions_.push_back(std::move(a));
  }

  void go(const std::string& location) {
    if (state_.agent.at != location) emit(Action::go_to(location));
  }

  void ensure_open(const std::string& location) {
    const Location* l = state_.location(location);
    if (l->openable && !l->open) emit(Action::open(location));
  }

  void fetch(const std::string& object) {
    const std::string at = state_.object(object)->at;
    go(at);
    ensure_open(at);
    emit(Action::pick(object));
  }

  void process(const std::string& object, const std::string& appliance, Skill skill) {
    go(appliance);
    const Location* l = state_.location(appliance);
    ensure_open(appliance);
    emit(Action::place(object, appliance));
    if (l->on) {
      emit({skill, object, {}});
    } else {
      if (l->openable) emit(Action::close(appliance));
      emit(Action::toggle(l->switch_name));
      ensure_open(appliance);
    }
    emit(Action::pick(object));
  }

  void deliver(const std::string& object, const std::string& destination) {
    go(destination);
    ensure_open(destination);
    emit(Action::place(object, destination));
  }

  WorldState state_;
  std::vector<Action> actions_;
};

std::string neighbor_phrase(const std::string& destination) {
  const auto& names = layout();
  const auto it = std::find(names.begin(), names.end(), destination);
  const auto index = static_cast<std::size_t>(it - names.begin());
  if (index + 1 < names.size()) {
    return "the spot to the left of the " + names[index + 1];
  }
  return "the spot to the right of the " + names[index - 1];
}

std::string base_clause(const Job& j, bool sentence_start) {
  std::string verb = sentence_start ? "Put" : "put";
  const std::string noun = j.color.empty() ? j.type : j.color + " " + j.type;
  const std::string where = prep(j.destination) + " the " + j.destination;
  switch (j.procedure) {
    case Procedure::clean:
      return verb + " a clean " + noun + " " + where;
    case Procedure::heat:
      return verb + " a hot " + noun + " " + where;
    case Procedure::cool:
      return verb + " a cold " + noun + " " + where;
    case Procedure::store:
      return verb + " the " + noun + " " + where;
  }
  return verb;
}

std::string complex_instruction(const Job& j) {
  const std::string where = prep(j.destination) + " the " + j.destination;
  switch (j.procedure) {
    case Procedure::clean:
      return "The " + j.type + " is dirty and I will need it later, so could you wash it "
             "for me and afterwards leave it " + where + "?";
    case Procedure::heat:
      return "I am in the mood for something warm, so please warm up the " + j.type +
             " and, once it is warm, set it down " + where + ".";
    case Procedure::cool:
      return "It is a really hot day; please make sure the " + j.type +
             " is nicely chilled before you leave it " + where + ".";
    case Procedure::store:
      return "The " + j.type + " is lying around; tidy it away by putting it inside the " +
             j.destination + ", please.";
  }
  return {};
}

std::string common_sense_instruction(const Job& j) {
  const std::string where = prep(j.destination) + " the " + j.destination;
  switch (j.procedure) {
    case Procedure::clean:
      return "Get the " + j.type + " ready so that someone can use it hygienically, and "
             "leave it " + where + ".";
    case Procedure::heat:
      return "Make the " + j.type + " ready for someone who only eats freshly cooked "
             "food, and leave it " + where + ".";
    case Procedure::cool:
      return "Turn the " + j.type + " into a refreshing treat for a summer afternoon and "
             "leave it " + where + ".";
    case Procedure::store:
      return "Keep the " + j.type + " from spoiling by storing it properly.";
  }
  return {};
}

std::string spatial_instruction(const Job& j) {
  const std::string target = "the " + j.type + " that is " + prep(j.source) + " the " + j.source;
  const std::string where = neighbor_phrase(j.destination);
  switch (j.procedure) {
    case Procedure::clean:
      return "Wash " + target + " and put it on " + where + ".";
    case Procedure::heat:
      return "Heat " + target + " and put it on " + where + ".";
    case Procedure::cool:
      return "Chill " + target + " and put it on " + where + ".";
    case Procedure::store:
      return "Move " + target + " into the storage at " + where + ".";
  }
  return {};
}

class SuiteGenerator {
 public:
  explicit SuiteGenerator(std::uint64_t seed) : seed_(seed) {}

  std::vector<TaskSpec> generate() {
    std::vector<TaskSpec> tasks;
    std::set<std::string> instructions;
    for (auto category : all_categories()) {
      for (int i = 0; i < kTasksPerCategory; ++i) {
        // Instructions are unique within a suite; re-roll on a collision.
        TaskSpec t = make_task(category, i, 0);
        for (std::uint64_t salt = 1; instructions.count(t.instruction) > 0; ++salt) {
          t = make_task(category, i, salt);
        }
        instructions.insert(t.instruction);
        tasks.push_back(std::move(t));
      }
    }
    return tasks;
  }

 private:
  TaskSpec make_task(TaskCategory category, int index, std::uint64_t salt) {
    const std::uint64_t task_seed =
        random::mix(seed_, salt * 1000000 + static_cast<std::uint64_t>(category) * 1000 +
                               static_cast<std::uint64_t>(index));
    std::mt19937_64 rng(task_seed);

    TaskSpec task;
    task.id = std::string(to_string(category)) + "-" + (index < 10 ? "0" : "") +
              std::to_string(index);
    task.category = category;
    task.split = index < kTasksPerCategory / 2 ? Split::seen : Split::unseen;
    task.t_max = kDefaultMaxSteps;
    task.initial.locations = kitchen();
    task.initial.rng_seed = task_seed;
    task.initial.agent.at = random::pick(layout(), rng);

    const Procedure procedure = kProcedures[static_cast<std::size_t>(index) % 4];
    std::vector<Job> jobs;
    std::vector<std::string> used_types;

    auto add_job = [&](Procedure p, bool with_color, bool with_decoy) {
      Job job = make_job(p, rng, used_types, category);
      used_types.push_back(job.type);
      if (with_color || with_decoy) {
        job.object = job.type + "_1";
        const std::string decoy_name = job.type + "_2";
        Object target = make_object(job.object, job.type, job.source);
        std::string decoy_at;
        do {
          decoy_at = random::pick(kPlaces, rng);
        } while (decoy_at == job.source);
        Object decoy = make_object(decoy_name, job.type, decoy_at);
        if (with_color) {
          std::vector<std::string> colors = kColors;
          random::shuffle(colors, rng);
          job.color = colors[0];
          target.attributes["color"] = colors[0];
          decoy.attributes["color"] = colors[1];
        }
        task.initial.objects.push_back(std::move(target));
        task.initial.objects.push_back(std::move(decoy));
      } else {
        job.object = job.type;
        task.initial.objects.push_back(make_object(job.object, job.type, job.source));
      }
      jobs.push_back(job);
    };

    switch (category) {
      case TaskCategory::base:
        add_job(procedure, false, false);
        task.instruction = base_clause(jobs[0], true) + ".";
        break;
      case TaskCategory::long_horizon: {
        add_job(procedure, false, false);
        const Procedure second =
            kProcedures[(static_cast<std::size_t>(index) + 1 + random::below(rng, 3)) % 4];
        add_job(second, false, false);
        task.instruction = base_clause(jobs[0], true) + ", and then " +
                           base_clause(jobs[1], false) + ".";
        break;
      }
      case TaskCategory::complex_instruction:
        add_job(procedure, false, false);
        task.instruction = complex_instruction(jobs[0]);
        break;
      case TaskCategory::common_sense:
        add_job(procedure, false, false);
        task.instruction = common_sense_instruction(jobs[0]);
        break;
      case TaskCategory::spatial:
        add_job(procedure, false, true);
        task.instruction = spatial_instruction(jobs[0]);
        break;
      case TaskCategory::visual_attribute:
        add_job(procedure, true, false);
        task.instruction = base_clause(jobs[0], true) + ".";
        break;
    }

    for (const auto& job : jobs) {
      for (auto& g : goal_for(job)) task.goal.push_back(std::move(g));
    }
    add_distractors(task, used_types, rng);

    task.oracle = OracleBuilder(task.initial).build(jobs);
    if (static_cast<int>(task.oracle.size()) > task.t_max) {
      throw Error("generated oracle for " + task.id + " exceeds t_max");
    }
    return task;
  }

  Job make_job(Procedure p, std::mt19937_64& rng,
               const std::vector<std::string>& used_types, TaskCategory category) {
    auto fresh = [&](const std::vector<std::string>& pool) {
      std::string t;
      do {
        t = random::pick(pool, rng);
      } while (std::find(used_types.begin(), used_types.end(), t) != used_types.end());
      return t;
    };
    Job job;
    job.procedure = p;
    switch (p) {
      case Procedure::clean:
        job.type = fresh(kDishes);
        break;
      case Procedure::heat:
      case Procedure::cool:
        job.type = fresh(kFoods);
        break;
      case Procedure::store:
        job.type = category == TaskCategory::common_sense ? fresh(kFoods)
                                                          : fresh(random::below(rng, 2) == 0
                                                                      ? kThings
                                                                      : kDishes);
        break;
    }

    std::vector<std::string> sources = kPlaces;
    if (p == Procedure::heat) sources.push_back("fridge");
    job.source = random::pick(sources, rng);

    if (p == Procedure::store) {
      if (category == TaskCategory::common_sense) {
        job.destination = "fridge";
      } else {
        do {
          job.destination = random::pick(kStorage, rng);
        } while (job.destination == job.source);
      }
    } else {
      do {
        job.destination = random::pick(kPlaces, rng);
      } while (job.destination == job.source);
    }
    return job;
  }

  void add_distractors(TaskSpec& task, const std::vector<std::string>& used_types,
                       std::mt19937_64& rng) {
    std::vector<std::string> candidates;
    for (const auto* pool : {&kDishes, &kFoods, &kThings}) {
      for (const auto& t : *pool) {
        if (std::find(used_types.begin(), used_types.end(), t) == used_types.end()) {
          candidates.push_back(t);
        }
      }
    }
    random::shuffle(candidates, rng);
    std::vector<std::string> spots = kPlaces;
    spots.push_back("fridge");
    const std::size_t count = 2 + random::below(rng, 2);
    for (std::size_t i = 0; i < count && i < candidates.size(); ++i) {
      task.initial.objects.push_back(
          make_object(candidates[i], candidates[i], random::pick(spots, rng)));
    }
  }

  std::uint64_t seed_;
};

}  // namespace

std::string procedure_family(const TaskSpec& task) {
  std::vector<std::string> objects;
  std::map<std::string, std::string> procedure;
  for (const auto& g : task.goal) {
    if (std::find(objects.begin(), objects.end(), g.object) == objects.end()) {
      objects.push_back(g.object);
      procedure[g.object] = "store";
    }
    if (g.attribute == "cleanliness" && g.value == "clean") procedure[g.object] = "clean";
    if (g.attribute == "temperature" && g.value == "hot") procedure[g.object] = "heat";
    if (g.attribute == "temperature" && g.value == "cold") procedure[g.object] = "cool";
  }
  std::string out;
  for (const auto& o : objects) {
    if (!out.empty()) out += "+";
    out += procedure[o];
  }
  return out;
}

std::vector<TaskSpec> builtin_suites(std::uint64_t seed) {
  return SuiteGenerator(seed).generate();
}

std::vector<TaskSpec> select_tasks(const std::vector<TaskSpec>& tasks,
                                   const TaskFilter& filter) {
  std::vector<TaskCategory> order = filter.categories;
  if (order.empty()) order = all_categories();

  std::vector<std::vector<const TaskSpec*>> buckets(order.size());
  for (const auto& t : tasks) {
    if (filter.split && t.split != *filter.split) continue;
    auto it = std::find(order.begin(), order.end(), t.category);
    if (it == order.end()) continue;
    buckets[static_cast<std::size_t>(it - order.begin())].push_back(&t);
  }

  std::vector<TaskSpec> out;
  if (!filter.limit) {
    for (const auto& t : tasks) {
      if (filter.split && t.split != *filter.split) continue;
      if (std::find(order.begin(), order.end(), t.category) == order.end()) continue;
      out.push_back(t);
    }
    return out;
  }
  for (std::size_t round = 0; out.size() < *filter.limit; ++round) {
    bool any = false;
    for (const auto& bucket : buckets) {
      if (round < bucket.size() && out.size() < *filter.limit) {
        out.push_back(*bucket[round]);
        any = true;
      }
    }
    if (!any) break;
  }
  return out;
}

void export_tasks(const std::vector<TaskSpec>& tasks, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& t : tasks) save_task(t, dir / (t.id + ".json"));
}

std::vector<TaskSpec> import_tasks(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw ConfigError("task directory does not exist: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<TaskSpec> tasks;
  for (const auto& f : files) {
    TaskSpec t = load_task(f);
    if (auto problems = t.validate(); !problems.empty()) {
      for (auto& p : problems) p = f.filename().string() + ": " + p;
      throw ValidationError(std::move(problems));
    }
    tasks.push_back(std::move(t));
  }
  return tasks;
}

}  // namespace elite
