#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "tngpricer/analytic_pricing.hpp"
#include "tngpricer/cdo.hpp"
#include "tngpricer/commands.hpp"
#include "tngpricer/errors.hpp"
#include "tngpricer/first_passage.hpp"
#include "tngpricer/numerics.hpp"
#include "tngpricer/tng.hpp"

namespace py = pybind11;
using namespace tngpricer;

namespace {

Matrix to_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& array) {
    if (array.ndim() != 2) throw DomainError("expected a 2-d array");
    Matrix out(static_cast<std::size_t>(array.shape(0)), static_cast<std::size_t>(array.shape(1)));
    auto view = array.unchecked<2>();
    for (py::ssize_t i = 0; i < array.shape(0); ++i)
        for (py::ssize_t j = 0; j < array.shape(1); ++j) out(i, j) = view(i, j);
    return out;
}

py::array_t<double> to_array(const Matrix& m) {
    py::array_t<double> out({m.rows(), m.cols()});
    auto view = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) view(i, j) = m(i, j);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = R"pbdoc(
        Structural-credit pricing of tax normalization guarantees: Merton bond
        prices, correlated first-passage default simulation and CDO tranches.
    )pbdoc";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const NumericError& e) {
            PyErr_SetString(PyExc_ArithmeticError, e.what());
        } catch (const IoError& e) {
            PyErr_SetString(PyExc_OSError, e.what());
        } catch (const Error& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    // numerics
    m.def("norm_cdf", &norm_cdf, py::arg("x"));
    m.def("ln_gamma", &ln_gamma, py::arg("x"));
    m.def("kummer_m", &kummer_m, py::arg("a"), py::arg("b"), py::arg("z"));
    m.def(
        "normal_draws",
        [](std::uint64_t seed, std::uint64_t stream_id, std::size_t count) {
            RandomStream stream(seed, stream_id);
            py::array_t<double> out(static_cast<py::ssize_t>(count));
            auto view = out.mutable_unchecked<1>();
            for (std::size_t k = 0; k < count; ++k) view(k) = stream.normal();
            return out;
        },
        py::arg("seed"), py::arg("stream_id"), py::arg("count"),
        "First `count` standard normal draws of the counter-based stream (seed, stream_id).");

    // market model
    py::class_<FlatCurve>(m, "FlatCurve")
        .def(py::init([](double r) { return FlatCurve{r}; }), py::arg("r"))
        .def_readwrite("r", &FlatCurve::r);

    py::class_<Firm>(m, "Firm")
        .def(py::init([](std::string id, double v0, double sigma, double barrier, double alpha, double mu) {
                 Firm f{std::move(id), v0, mu, sigma, barrier, alpha};
                 validate(f);
                 return f;
             }),
             py::arg("id"), py::arg("v0"), py::arg("sigma"), py::arg("barrier"), py::arg("alpha") = 0.0,
             py::arg("mu") = 0.0)
        .def_readwrite("id", &Firm::id)
        .def_readwrite("v0", &Firm::v0)
        .def_readwrite("mu", &Firm::mu)
        .def_readwrite("sigma", &Firm::sigma)
        .def_readwrite("barrier", &Firm::barrier)
        .def_readwrite("alpha", &Firm::alpha)
        .def("__repr__", [](const Firm& f) { return "<Firm " + f.id + ">"; });

    py::class_<BarrierParams>(m, "BarrierParams")
        .def_readonly("beta", &BarrierParams::beta)
        .def_readonly("gamma", &BarrierParams::gamma);

    m.def("riskless_discount", &riskless_discount, py::arg("curve"), py::arg("tau"));
    m.def("quasi_debt_ratio", &quasi_debt_ratio, py::arg("firm_value"), py::arg("face"), py::arg("curve"),
          py::arg("tau"));
    m.def("x_of_v", &x_of_v, py::arg("firm"), py::arg("v_t"), py::arg("t"));
    m.def("barrier_params", &barrier_params, py::arg("firm"));
    m.def("barrier_level", &barrier_level, py::arg("params"), py::arg("t"));

    // analytic pricing
    m.def(
        "merton_h",
        [](double d, double sigma2tau) {
            const auto h = merton_h(d, sigma2tau);
            return py::make_tuple(h.h1, h.h2);
        },
        py::arg("d"), py::arg("sigma2tau"));
    m.def(
        "merton_discount_bond",
        [](double firm_value, double face, double maturity, const FlatCurve& curve, double sigma) {
            return merton_discount_bond(firm_value, {face, maturity}, curve, sigma);
        },
        py::arg("firm_value"), py::arg("face"), py::arg("maturity"), py::arg("curve"), py::arg("sigma"));
    m.def(
        "credit_spread",
        [](double price, double face, double maturity, const FlatCurve& curve) {
            return credit_spread(price, {face, maturity}, curve);
        },
        py::arg("price"), py::arg("face"), py::arg("maturity"), py::arg("curve"));
    m.def(
        "perpetual_coupon_bond",
        [](double firm_value, double coupon_rate, const FlatCurve& curve, double sigma) {
            return perpetual_coupon_bond(firm_value, {coupon_rate}, curve, sigma);
        },
        py::arg("firm_value"), py::arg("coupon_rate"), py::arg("curve"), py::arg("sigma"));
    m.def(
        "pde_residual",
        [](const std::vector<double>& v_grid, const std::vector<double>& tau_grid,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& values, const FlatCurve& curve,
           double sigma) {
            const GridSurface surface{v_grid, tau_grid, to_matrix(values)};
            return to_array(pde_residual(surface, curve, sigma));
        },
        py::arg("v_grid"), py::arg("tau_grid"), py::arg("values"), py::arg("curve"), py::arg("sigma"),
        "Interior residuals of the payout-free valuation PDE for a sampled claim surface.");

    // tng
    py::class_<TNGContract>(m, "TNGContract")
        .def(py::init([](std::string obligor_id, double tax_amount, double initiation, double maturity,
                         double contract_rate, std::string id, std::string guarantor_id) {
                 TNGContract c{std::move(id), std::move(obligor_id), std::move(guarantor_id), tax_amount, initiation,
                               maturity, contract_rate};
                 validate(c);
                 return c;
             }),
             py::arg("obligor_id"), py::arg("tax_amount"), py::arg("initiation"), py::arg("maturity"),
             py::arg("contract_rate") = 0.0, py::arg("id") = "", py::arg("guarantor_id") = "")
        .def_readwrite("id", &TNGContract::id)
        .def_readwrite("obligor_id", &TNGContract::obligor_id)
        .def_readwrite("guarantor_id", &TNGContract::guarantor_id)
        .def_readwrite("tax_amount", &TNGContract::tax_amount)
        .def_readwrite("initiation", &TNGContract::initiation)
        .def_readwrite("maturity", &TNGContract::maturity)
        .def_readwrite("contract_rate", &TNGContract::contract_rate);

    m.def("tng_face", &tng_face, py::arg("contract"));
    m.def("tng_price", &tng_price, py::arg("contract"), py::arg("firm"), py::arg("curve"), py::arg("valuation_time"));

    py::class_<Pool>(m, "Pool")
        .def_property_readonly("notional", &Pool::notional)
        .def("__len__", &Pool::size)
        .def("firms", &Pool::firms);
    m.def("build_pool", &build_pool, py::arg("contracts"), py::arg("firms"));

    // first passage
    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init([](std::size_t n_paths, std::size_t n_steps, double horizon, std::uint64_t seed, bool bridge,
                         unsigned threads) {
                 SimConfig c{n_paths, n_steps, horizon, seed, bridge, threads};
                 validate(c);
                 return c;
             }),
             py::arg("n_paths"), py::arg("n_steps"), py::arg("horizon"), py::arg("seed"),
             py::arg("bridge_correction") = true, py::arg("threads") = 1)
        .def_readwrite("n_paths", &SimConfig::n_paths)
        .def_readwrite("n_steps", &SimConfig::n_steps)
        .def_readwrite("horizon", &SimConfig::horizon)
        .def_readwrite("seed", &SimConfig::seed)
        .def_readwrite("bridge_correction", &SimConfig::bridge_correction)
        .def_readwrite("threads", &SimConfig::threads);

    py::class_<DefaultTable>(m, "DefaultTable")
        .def_property_readonly("n_paths", &DefaultTable::n_paths)
        .def_property_readonly("firm_ids", &DefaultTable::firm_ids)
        .def_property_readonly("horizon", &DefaultTable::horizon)
        .def(
            "default_times",
            [](const DefaultTable& t) {
                py::array_t<double> out({t.n_paths(), t.n_firms()});
                std::copy(t.raw().begin(), t.raw().end(), out.mutable_data());
                return out;
            },
            "Paths x firms array of default times; inf marks survival.");

    m.def("first_passage_probability", &first_passage_probability, py::arg("barrier"), py::arg("t"));
    m.def("bridge_crossing_probability", &bridge_crossing_probability, py::arg("x_start"), py::arg("x_end"),
          py::arg("b_start"), py::arg("b_end"), py::arg("dt"));
    m.def("simulate_defaults", &simulate_defaults, py::arg("firms"), py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("survival_curve", &survival_curve, py::arg("table"), py::arg("firm_id"), py::arg("times"));
    m.def("pairwise_default_correlation", &pairwise_default_correlation, py::arg("table"), py::arg("firm_a"),
          py::arg("firm_b"), py::arg("t"));
    m.def(
        "process_increment_correlation",
        [](const std::vector<Firm>& firms, const SimConfig& config) {
            return to_array(process_increment_correlation(firms, config));
        },
        py::arg("firms"), py::arg("config"));
    m.def(
        "calibrate_alphas",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& target) {
            const auto fit = calibrate_alphas(to_matrix(target));
            return py::make_tuple(fit.alphas, fit.objective);
        },
        py::arg("target"), "Returns (alphas, objective).");

    // cdo
    py::enum_<TrancheLabel>(m, "TrancheLabel")
        .value("equity", TrancheLabel::equity)
        .value("mezzanine", TrancheLabel::mezzanine)
        .value("senior", TrancheLabel::senior);

    py::class_<Tranche>(m, "Tranche")
        .def(py::init([](double a, double d, TrancheLabel label) { return Tranche{a, d, label}; }),
             py::arg("attachment"), py::arg("detachment"), py::arg("label"))
        .def_readwrite("attachment", &Tranche::attachment)
        .def_readwrite("detachment", &Tranche::detachment)
        .def_readwrite("label", &Tranche::label);

    py::class_<CDOSpec>(m, "CDOSpec")
        .def(py::init([](Pool pool, std::vector<Tranche> tranches, double recovery, double maturity,
                         double premium_frequency) {
                 CDOSpec spec{std::move(pool), std::move(tranches), recovery, maturity, premium_frequency};
                 validate(spec);
                 return spec;
             }),
             py::arg("pool"), py::arg("tranches"), py::arg("recovery"), py::arg("maturity"),
             py::arg("premium_frequency") = 4.0);

    py::class_<TrancheReport>(m, "TrancheReport")
        .def_readonly("tranche", &TrancheReport::tranche)
        .def_readonly("expected_loss", &TrancheReport::expected_loss)
        .def_readonly("standard_error", &TrancheReport::standard_error)
        .def_readonly("terminal_loss", &TrancheReport::terminal_loss)
        .def_readonly("premium_leg", &TrancheReport::premium_leg)
        .def_readonly("fair_spread", &TrancheReport::fair_spread)
        .def_readonly("spread_standard_error", &TrancheReport::spread_standard_error);

    m.def("tranche_loss", &tranche_loss, py::arg("pool_loss_fraction"), py::arg("tranche"));
    m.def("price_tranches", &price_tranches, py::arg("table"), py::arg("spec"), py::arg("curve"));

    // batch front end
    m.def(
        "run",
        [](const std::string& command, const std::optional<std::filesystem::path>& scenario,
           const std::filesystem::path& out_dir, std::optional<std::uint64_t> seed, std::optional<std::size_t> paths,
           std::optional<std::size_t> steps) {
            RunFlags flags;
            flags.out_dir = out_dir;
            flags.seed = seed;
            flags.paths = paths;
            flags.steps = steps;
            std::optional<Scenario> loaded;
            if (scenario) loaded = load_scenario(*scenario);
            run_command(command, loaded, flags);
        },
        py::arg("command"), py::arg("scenario") = py::none(), py::arg("out_dir") = ".", py::arg("seed") = py::none(),
        py::arg("paths") = py::none(), py::arg("steps") = py::none(),
        "Runs a tngpricer command and writes its reports to out_dir.");

    m.attr("__version__") = "0.1.0";
}
