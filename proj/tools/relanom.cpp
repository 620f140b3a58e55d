// relanom: command-line front end for relative anomaly detection.

#include "relanom/csv_io.hpp"
#include "relanom/model_file.hpp"
#include "relanom/pipeline.hpp"
#include "relanom/synth.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

namespace {

using namespace relanom;

void emit(const std::string& output, const std::function<void(std::ostream&)>& writer) {
    if (output.empty() || output == "-") {
        writer(std::cout);
        std::cout.flush();
    } else {
        write_file_atomically(output, writer);
    }
}

void warn_about(const FittedModel& model) {
    for (std::size_t j = 0; j < model.transform.columns.size(); ++j) {
        if (model.transform.columns[j].boundary_warning) {
            std::cerr << "warning: Box-Cox fit for column '" << model.transform.column_names[j]
                      << "' sits on the search boundary\n";
        }
    }
    if (const auto* sp = std::get_if<ShortestPathModel>(&model.state); sp && sp->unreachable > 0) {
        std::cerr << "warning: " << sp->unreachable
                  << " observations cannot reach the normal set; their ra_q is inf\n";
    }
}

SimilarityGraph rebuild_graph(const FittedModel& model) {
    const Dataset& data = model.training();
    SimilarityGraph graph = rbf_similarity_matrix(data, model.config.gamma, model.config.metric);
    if (model.config.method == Method::popularity && model.config.sparsify > 0.0) {
        return threshold_sparsify(graph, model.config.sparsify);
    }
    if (model.config.method == Method::shortest_path && model.config.k) {
        return symmetrize_max(knn_truncate(graph, *model.config.k));
    }
    return graph;
}

GridBounds parse_bounds(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        v.push_back(std::stod(cell));
    }
    if (v.size() != 4) {
        throw std::invalid_argument("--bounds expects xmin,xmax,ymin,ymax");
    }
    return {v[0], v[1], v[2], v[3]};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relative anomaly detection on kernel similarity graphs"};
    app.require_subcommand(1);

    // fit
    auto* fit = app.add_subcommand("fit", "Fit a model and write it as JSON");
    std::string method_name = "popularity";
    std::optional<double> gamma;
    ModelConfig config;
    std::optional<int> k;
    std::optional<int> rff_dim;
    std::string start_name = "uniform";
    std::string metric_name = "l2";
    std::string input;
    std::string output;
    std::string dump_graph;
    bool standardize_only = false;
    fit->add_option("--method", method_name, "vertex_degree | popularity | shortest_path")
        ->check(CLI::IsMember({"vertex_degree", "popularity", "shortest_path"}));
    fit->add_option("--gamma", gamma, "Kernel bandwidth (default 0.5 for vertex_degree, else 0.2)");
    fit->add_option("--q", config.q, "Normal-set fraction for shortest_path")->capture_default_str();
    fit->add_option("--k", k, "k-nearest-neighbour sparsification of the path graph");
    fit->add_option("--sparsify", config.sparsify, "Fraction of smallest similarities to drop (popularity)")
        ->capture_default_str();
    fit->add_option("--start", start_name, "Power iteration start: uniform | random | rff")
        ->check(CLI::IsMember({"uniform", "random", "rff"}));
    fit->add_option("--rff-dim", rff_dim, "Random Fourier features for the warm start (implies --start rff)");
    fit->add_option("--tol", config.tol, "Power iteration residual tolerance")->capture_default_str();
    fit->add_option("--max-iter", config.max_iter, "Iteration limit")->capture_default_str();
    fit->add_option("--metric", metric_name, "Distance for the kernel: l1 | l2")
        ->check(CLI::IsMember({"l1", "l2"}));
    fit->add_option("--seed", config.seed, "Seed for all randomness")->capture_default_str();
    fit->add_option("--input", input, "Training CSV")->required();
    fit->add_option("--output", output, "Model file")->required();
    fit->add_flag("--standardize-only", standardize_only, "Skip the Box-Cox fit");
    fit->add_flag("--stationary", config.stationary, "vertex_degree: also compute the stationary distribution");
    fit->add_option("--dump-graph", dump_graph, "Write the fitted similarity graph as i,j,s_ij lines");

    // score
    auto* score = app.add_subcommand("score", "Score observations with a fitted model");
    std::string model_path;
    std::string score_input;
    std::string score_output;
    std::optional<double> top_fraction;
    bool display_log = false;
    score->add_option("--model", model_path, "Model file")->required();
    score->add_option("--input", score_input, "Raw observations (default: the training data)");
    score->add_option("--output", score_output, "Output CSV (default: stdout)");
    score->add_option("--top-fraction", top_fraction, "Label this fraction of the rows as anomalous");
    score->add_flag("--display-log", display_log, "popularity: add a display column -ln(-RA)");

    // explain
    auto* explain = app.add_subcommand("explain", "Largest univariate deviations from the closest normal row");
    std::string explain_model;
    std::string explain_input;
    std::optional<long> explain_row;
    double p_normal = 0.5;
    std::string explain_metric = "l1";
    std::string format = "table";
    std::string explain_output;
    explain->add_option("--model", explain_model, "Model file")->required();
    auto* explain_input_opt = explain->add_option("--input", explain_input, "Raw observations to explain");
    explain->add_option("--row", explain_row, "Training row to explain")->excludes(explain_input_opt);
    explain->add_option("--p-normal", p_normal, "DORA below which a training row counts as normal")
        ->capture_default_str();
    explain->add_option("--metric", explain_metric, "l1 | l2")->check(CLI::IsMember({"l1", "l2"}));
    explain->add_option("--format", format, "table | csv")->check(CLI::IsMember({"table", "csv"}));
    explain->add_option("--output", explain_output, "Output file (default: stdout)");

    // grid
    auto* grid = app.add_subcommand("grid", "Score a regular grid in model space (two-feature models)");
    std::string grid_model;
    std::string bounds_text;
    int resolution = 50;
    std::string grid_output;
    grid->add_option("--model", grid_model, "Model file")->required();
    grid->add_option("--bounds", bounds_text, "xmin,xmax,ymin,ymax (default: data range + 10%)");
    grid->add_option("--resolution", resolution, "Points per axis")->capture_default_str();
    grid->add_option("--output", grid_output, "Output CSV (default: stdout)");

    // compare
    auto* compare = app.add_subcommand("compare", "Precision and recall of all three methods on labeled data");
    std::string compare_input;
    std::string compare_output;
    CompareConfig cmp;
    std::string compare_metric = "l2";
    bool compare_standardize_only = false;
    compare->add_option("--input", compare_input, "CSV with a trailing label column")->required();
    compare->add_option("--gamma", cmp.gamma, "Bandwidth for the relative methods")->capture_default_str();
    compare->add_option("--gamma-baseline", cmp.baseline_gamma, "Bandwidth for vertex_degree")
        ->capture_default_str();
    compare->add_option("--q", cmp.q, "Normal-set fraction")->capture_default_str();
    compare->add_option("--top-fraction", cmp.top_fraction, "Fraction labeled anomalous")->capture_default_str();
    compare->add_option("--metric", compare_metric, "l1 | l2")->check(CLI::IsMember({"l1", "l2"}));
    compare->add_option("--seed", cmp.base.seed, "Seed")->capture_default_str();
    compare->add_flag("--standardize-only", compare_standardize_only, "Skip the Box-Cox fit");
    compare->add_option("--output", compare_output, "Output CSV (default: stdout)");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic dataset");
    std::string kind = "scraping";
    int n = 1000;
    std::uint64_t synth_seed = 0;
    std::string synth_output;
    synth->add_option("--kind", kind, "scraping | wifi")->check(CLI::IsMember({"scraping", "wifi"}));
    synth->add_option("--n", n, "Number of observations")->capture_default_str();
    synth->add_option("--seed", synth_seed, "Seed")->capture_default_str();
    synth->add_option("--output", synth_output, "Output CSV (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit->parsed()) {
            config.method = parse_method(method_name);
            config.gamma = gamma.value_or(config.method == Method::vertex_degree ? 0.5 : 0.2);
            config.k = k;
            config.metric = parse_metric(metric_name);
            config.box_cox = !standardize_only;
            config.start = start_name == "rff" ? StartVector::rff
                           : start_name == "random" ? StartVector::random
                                                    : StartVector::uniform;
            if (rff_dim) {
                config.start = StartVector::rff;
                config.rff_dim = *rff_dim;
            }
            const CsvTable table = read_csv_file(input);
            const FittedModel model = fit_model(table.data, config);
            warn_about(model);
            save_model_file(output, model);
            if (!dump_graph.empty()) {
                const SimilarityGraph graph = rebuild_graph(model);
                write_file_atomically(dump_graph, [&](std::ostream& out) { write_coordinate_dump(out, graph); });
            }
        } else if (score->parsed()) {
            const FittedModel model = load_model_file(model_path);
            const bool training_rows = score_input.empty();
            const ScoredRows rows =
                training_rows ? score_training(model) : score_raw(model, read_csv_file(score_input).data);
            std::optional<std::vector<bool>> labels;
            if (top_fraction) {
                labels = label_top_fraction(rows.anomaly, *top_fraction);
            }
            emit(score_output, [&](std::ostream& out) {
                write_scores(out, model, rows, training_rows, labels ? &*labels : nullptr, display_log);
            });
        } else if (explain->parsed()) {
            const FittedModel model = load_model_file(explain_model);
            const ScoredRows training = score_training(model);
            const Dataset& data = model.training();
            std::vector<Eigen::VectorXd> targets;
            if (explain_row) {
                if (*explain_row < 0 || *explain_row >= data.rows()) {
                    throw std::out_of_range("--row is outside the training data");
                }
                targets.push_back(data.values.row(*explain_row).transpose());
            } else if (!explain_input.empty()) {
                const Dataset mapped = apply_preprocessor(read_csv_file(explain_input).data, model.transform);
                for (Eigen::Index i = 0; i < mapped.rows(); ++i) {
                    targets.push_back(mapped.values.row(i).transpose());
                }
            } else {
                throw std::invalid_argument("explain needs --row or --input");
            }
            const DistanceMetric metric = parse_metric(explain_metric);
            emit(explain_output, [&](std::ostream& out) {
                for (std::size_t t = 0; t < targets.size(); ++t) {
                    const Explanation e = explain_deviations(targets[t], data, training.dora, p_normal, metric);
                    if (targets.size() > 1) {
                        out << (t ? "\n" : "") << "# observation " << t << ", closest normal training row "
                            << e.closest_index << '\n';
                    }
                    write_explanation(out, e, format == "table");
                }
            });
        } else if (grid->parsed()) {
            const FittedModel model = load_model_file(grid_model);
            const GridBounds bounds = bounds_text.empty() ? default_grid_bounds(model) : parse_bounds(bounds_text);
            const auto points = grid_scores(model, bounds, resolution);
            emit(grid_output, [&](std::ostream& out) {
                out << std::setprecision(std::numeric_limits<double>::max_digits10) << "x,y,score\n";
                for (const auto& p : points) {
                    out << p.x << ',' << p.y << ',' << p.score << '\n';
                }
            });
        } else if (compare->parsed()) {
            const CsvTable table = read_csv_file(compare_input);
            if (!table.labels) {
                throw std::invalid_argument("compare needs a trailing 'label' column");
            }
            std::vector<bool> truth;
            for (const auto& label : *table.labels) {
                truth.push_back(parse_cluster_label(label) == ClusterLabel::anomalous);
            }
            cmp.base.metric = parse_metric(compare_metric);
            cmp.base.box_cox = !compare_standardize_only;
            const auto results = compare_methods(table.data, truth, cmp);
            emit(compare_output, [&](std::ostream& out) {
                out << "method,precision,recall,true_positives,labeled,anomalies\n";
                for (const auto& r : results) {
                    out << to_string(r.method) << ',' << r.precision << ',' << r.recall << ',' << r.true_positives
                        << ',' << r.labeled << ',' << r.anomalies << '\n';
                }
            });
        } else if (synth->parsed()) {
            const auto specs = kind == "wifi" ? wifi_analogue() : scraping_analogue();
            const SyntheticData data = generate_mixture(specs, n, synth_seed);
            std::vector<std::string> labels;
            for (auto l : data.labels) {
                labels.push_back(to_string(l));
            }
            emit(synth_output, [&](std::ostream& out) { write_csv(out, data.data, &labels); });
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
