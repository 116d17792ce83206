#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pqlab/exact.hpp"

namespace pqlab {

struct SobolevContext {
  int n = 3;
  double two_star = 6.0;

  // n > 2: 2n/(n-2). n = 2: the override if given, else a value chosen from alpha, gamma, beta.
  static SobolevContext for_dimension(int n, double alpha, double gamma, std::optional<double> two_star = {},
                                      double beta = 1.0);
  Rational two_star_exact() const;
};

struct ExponentParams {
  double alpha = 2.0;
  double beta = 1.0;
  double gamma = 1.0;
  double delta = 0.0;
  SobolevContext ctx;
};

ExponentParams make_params(int n, double alpha, double beta, double gamma,
                           std::optional<double> two_star = {});

struct ParamsResult {
  bool accepted = false;
  ExponentParams params;
  std::string reason;
  std::optional<double> coeff_theta;
};

ExponentParams default_params(int n, double alpha, double delta, std::optional<double> two_star = {});
ParamsResult anisotropic_params(double p, double q, int n);
ParamsResult double_phase_params(double p, double q, int n);
double px_delta(double p_min, double theta, double omega);
ParamsResult exponential_params(double alpha, double theta, double delta, int n = 2);

ParamsResult exponential_auto_params(double theta, int n);
ParamsResult px_auto_params(double p_min, double theta, double omega, int n);

std::vector<double> lambda_sequence(const ExponentParams& params, int K);
std::vector<Rational> lambda_sequence_exact(const ExponentParams& params, int K);
double lambda_closed_form(const ExponentParams& params, int k);
Rational lambda_closed_form_exact(const ExponentParams& params, int k);

struct MoserSchedule {
  ExponentParams params;
  double nu = 1.0;
  std::optional<double> mu;  // empty: unbounded
  std::vector<double> lambdas;
  double theta0 = 0.0, theta1 = 0.0, theta2 = 0.0, theta3 = 0.0, theta4 = 0.0;
  std::optional<double> coeff_theta;
};

double nu_upper(const ExponentParams& params);
MoserSchedule moser_exponents(const ExponentParams& params, double nu, std::optional<double> mu, int K = 8);

struct MuNuChoice {
  bool accepted = false;
  double nu = 1.0;
  std::optional<double> mu;
  std::string reason;
  double beta_attainable_upper = 0.0;
};

MuNuChoice select_mu_nu(const ExponentParams& params);

std::string format_schedule(const MoserSchedule& s);

}  // namespace pqlab
