#include "follownet/ops.hpp"

#include <algorithm>
#include <cmath>

#include "follownet/errors.hpp"

namespace follownet {

double apply_activation(Activation act, double x) {
  switch (act) {
    case Activation::kIdentity: return x;
    case Activation::kRelu: return x > 0.0 ? x : 0.0;
    case Activation::kTanh: return std::tanh(x);
    case Activation::kSigmoid: return 1.0 / (1.0 + std::exp(-x));
  }
  throw InternalError("unknown activation");
}

double activation_grad(Activation act, double out) {
  switch (act) {
    case Activation::kIdentity: return 1.0;
    case Activation::kRelu: return out > 0.0 ? 1.0 : 0.0;
    case Activation::kTanh: return 1.0 - out * out;
    case Activation::kSigmoid: return out * (1.0 - out);
  }
  throw InternalError("unknown activation");
}

namespace {

bool tape_on(std::initializer_list<const TensorPtr*> inputs) {
  if (!GradMode::enabled()) return false;
  for (const TensorPtr* t : inputs) {
    if (*t && (*t)->requires_grad) return true;
  }
  return false;
}

void attach(const TensorPtr& out, std::vector<TensorPtr> parents, std::function<void()> fn) {
  out->set_requires_grad(true);
  out->parents = std::move(parents);
  out->backward_fn = std::move(fn);
}

}  // namespace

TensorPtr dense(const TensorPtr& x, const TensorPtr& w, const TensorPtr& b, Activation act) {
  if (w->shape.size() != 2) {
    throw ConfigError("dense: weights must be rank 2, got " + shape_str(w->shape));
  }
  const int n_out = w->shape[0];
  const int n_in = w->shape[1];
  if (x->size() != n_in) {
    throw ConfigError("dense: input " + shape_str(x->shape) + " does not match weights " +
                      shape_str(w->shape));
  }
  if (b->shape != Shape{n_out}) {
    throw ConfigError("dense: bias " + shape_str(b->shape) + " does not match weights " +
                      shape_str(w->shape));
  }

  auto out = Tensor::zeros({n_out});
  const double* xv = x->values.data();
  const double* wv = w->values.data();
  for (int i = 0; i < n_out; ++i) {
    double s = b->values[i];
    const double* wrow = wv + static_cast<std::size_t>(i) * n_in;
    for (int j = 0; j < n_in; ++j) s += wrow[j] * xv[j];
    out->values[i] = apply_activation(act, s);
  }

  if (tape_on({&x, &w, &b})) {
    Tensor* op = out.get();
    Tensor* xp = x.get();
    Tensor* wp = w.get();
    Tensor* bp = b.get();
    attach(out, {x, w, b}, [op, xp, wp, bp, act, n_out, n_in] {
      for (int i = 0; i < n_out; ++i) {
        const double g = op->grad[i] * activation_grad(act, op->values[i]);
        if (g == 0.0) continue;
        if (bp->requires_grad) bp->grad[i] += g;
        const std::size_t row = static_cast<std::size_t>(i) * n_in;
        if (wp->requires_grad) {
          for (int j = 0; j < n_in; ++j) wp->grad[row + j] += g * xp->values[j];
        }
        if (xp->requires_grad) {
          for (int j = 0; j < n_in; ++j) xp->grad[j] += g * wp->values[row + j];
        }
      }
    });
  }
  return out;
}

TensorPtr conv2d(const TensorPtr& x, const TensorPtr& kernels, const TensorPtr& bias,
                 int stride, Activation act) {
  if (x->shape.size() != 3) {
    throw ConfigError("conv2d: input must be [H x W x C], got " + shape_str(x->shape));
  }
  if (kernels->shape.size() != 4 || kernels->shape[0] != kernels->shape[1]) {
    throw ConfigError("conv2d: kernels must be [k x k x C_in x C_out], got " +
                      shape_str(kernels->shape));
  }
  const int h = x->shape[0], w = x->shape[1], c_in = x->shape[2];
  const int k = kernels->shape[0], c_out = kernels->shape[3];
  if (kernels->shape[2] != c_in) {
    throw ConfigError("conv2d: kernel channels " + shape_str(kernels->shape) +
                      " do not match input " + shape_str(x->shape));
  }
  if (bias->shape != Shape{c_out}) {
    throw ConfigError("conv2d: bias " + shape_str(bias->shape) + " does not match " +
                      std::to_string(c_out) + " output channels");
  }
  if (stride < 1) throw ConfigError("conv2d: stride must be >= 1");
  if (k < 1) throw ConfigError("conv2d: kernel size must be >= 1");

  const int out_h = (h + stride - 1) / stride;
  const int out_w = (w + stride - 1) / stride;
  const int pad_h = std::max(0, (out_h - 1) * stride + k - h);
  const int pad_w = std::max(0, (out_w - 1) * stride + k - w);
  const int pad_top = pad_h / 2;
  const int pad_left = pad_w / 2;
  // Same padding always produces a padded extent >= k, so the fit check is
  // done against the raw input: a kernel wider than the image is a config bug.
  if (k > h || k > w) {
    throw ConfigError("conv2d: kernel " + std::to_string(k) + " larger than input " +
                      shape_str(x->shape));
  }

  auto out = Tensor::zeros({out_h, out_w, c_out});
  const double* xv = x->values.data();
  const double* kv = kernels->values.data();
  std::vector<double> acc(static_cast<std::size_t>(c_out));
  for (int oy = 0; oy < out_h; ++oy) {
    for (int ox = 0; ox < out_w; ++ox) {
      for (int co = 0; co < c_out; ++co) acc[co] = bias->values[co];
      for (int ky = 0; ky < k; ++ky) {
        const int iy = oy * stride + ky - pad_top;
        if (iy < 0 || iy >= h) continue;
        for (int kx = 0; kx < k; ++kx) {
          const int ix = ox * stride + kx - pad_left;
          if (ix < 0 || ix >= w) continue;
          const double* xpix = xv + (static_cast<std::size_t>(iy) * w + ix) * c_in;
          const double* kpix = kv + ((static_cast<std::size_t>(ky) * k + kx) * c_in) * c_out;
          for (int ci = 0; ci < c_in; ++ci) {
            const double v = xpix[ci];
            if (v == 0.0) continue;
            const double* krow = kpix + static_cast<std::size_t>(ci) * c_out;
            for (int co = 0; co < c_out; ++co) acc[co] += v * krow[co];
          }
        }
      }
      double* orow = out->values.data() + (static_cast<std::size_t>(oy) * out_w + ox) * c_out;
      for (int co = 0; co < c_out; ++co) orow[co] = apply_activation(act, acc[co]);
    }
  }

  if (tape_on({&x, &kernels, &bias})) {
    Tensor* op = out.get();
    Tensor* xp = x.get();
    Tensor* kp = kernels.get();
    Tensor* bp = bias.get();
    attach(out, {x, kernels, bias},
           [op, xp, kp, bp, act, h, w, c_in, k, c_out, out_h, out_w, stride, pad_top, pad_left] {
             std::vector<double> gs(static_cast<std::size_t>(c_out));
             for (int oy = 0; oy < out_h; ++oy) {
               for (int ox = 0; ox < out_w; ++ox) {
                 const std::size_t obase = (static_cast<std::size_t>(oy) * out_w + ox) * c_out;
                 bool any = false;
                 for (int co = 0; co < c_out; ++co) {
                   gs[co] = op->grad[obase + co] *
                            activation_grad(act, op->values[obase + co]);
                   if (gs[co] != 0.0) any = true;
                 }
                 if (!any) continue;
                 if (bp->requires_grad) {
                   for (int co = 0; co < c_out; ++co) bp->grad[co] += gs[co];
                 }
                 for (int ky = 0; ky < k; ++ky) {
                   const int iy = oy * stride + ky - pad_top;
                   if (iy < 0 || iy >= h) continue;
                   for (int kx = 0; kx < k; ++kx) {
                     const int ix = ox * stride + kx - pad_left;
                     if (ix < 0 || ix >= w) continue;
                     const std::size_t xbase = (static_cast<std::size_t>(iy) * w + ix) * c_in;
                     const std::size_t kbase =
                         (static_cast<std::size_t>(ky) * k + kx) * c_in * c_out;
                     if (kp->requires_grad) {
                       for (int ci = 0; ci < c_in; ++ci) {
                         const double v = xp->values[xbase + ci];
                         if (v == 0.0) continue;
                         double* krow = kp->grad.data() + kbase + static_cast<std::size_t>(ci) * c_out;
                         for (int co = 0; co < c_out; ++co) krow[co] += v * gs[co];
                       }
                     }
                     if (xp->requires_grad) {
                       for (int ci = 0; ci < c_in; ++ci) {
                         const double* krow =
                             kp->values.data() + kbase + static_cast<std::size_t>(ci) * c_out;
                         double acc = 0.0;
                         for (int co = 0; co < c_out; ++co) acc += krow[co] * gs[co];
                         xp->grad[xbase + ci] += acc;
                       }
                     }
                   }
                 }
               }
             }
           });
  }
  return out;
}

GruParams gru_params_from(const ParameterSet& params, const std::string& prefix) {
  auto need = [&](const char* name) -> TensorPtr {
    const std::string full = prefix + name;
    if (!params.contains(full)) {
      throw ConfigError("gru_cell: parameter set is missing '" + full + "'");
    }
    return params.get(full);
  };
  GruParams p;
  p.wz = need("wz"); p.uz = need("uz"); p.bz = need("bz");
  p.wr = need("wr"); p.ur = need("ur"); p.br = need("br");
  p.wh = need("wh"); p.uh = need("uh"); p.bh = need("bh");
  return p;
}

namespace {

// y += M v for M [rows x cols]
void matvec_acc(const TensorPtr& m, const double* v, double* y, int rows, int cols) {
  const double* mv = m->values.data();
  for (int i = 0; i < rows; ++i) {
    double s = 0.0;
    const double* row = mv + static_cast<std::size_t>(i) * cols;
    for (int j = 0; j < cols; ++j) s += row[j] * v[j];
    y[i] += s;
  }
}

void check_gru_shapes(const TensorPtr& x, const TensorPtr& h, const GruParams& p) {
  const int dx = static_cast<int>(x->size());
  const int dh = static_cast<int>(h->size());
  auto expect = [&](const TensorPtr& t, const Shape& s, const char* name) {
    if (t->shape != s) {
      throw ConfigError(std::string("gru_cell: ") + name + " has shape " + shape_str(t->shape) +
                        ", expected " + shape_str(s));
    }
  };
  expect(p.wz, {dh, dx}, "W_z"); expect(p.uz, {dh, dh}, "U_z"); expect(p.bz, {dh}, "b_z");
  expect(p.wr, {dh, dx}, "W_r"); expect(p.ur, {dh, dh}, "U_r"); expect(p.br, {dh}, "b_r");
  expect(p.wh, {dh, dx}, "W_h"); expect(p.uh, {dh, dh}, "U_h"); expect(p.bh, {dh}, "b_h");
}

}  // namespace

TensorPtr gru_cell(const TensorPtr& x, const TensorPtr& h, const GruParams& p) {
  check_gru_shapes(x, h, p);
  const int dx = static_cast<int>(x->size());
  const int dh = static_cast<int>(h->size());

  std::vector<double> z(dh), r(dh), hc(dh), rh(dh);
  {
    std::vector<double> sz(p.bz->values), sr(p.br->values);
    matvec_acc(p.wz, x->values.data(), sz.data(), dh, dx);
    matvec_acc(p.uz, h->values.data(), sz.data(), dh, dh);
    matvec_acc(p.wr, x->values.data(), sr.data(), dh, dx);
    matvec_acc(p.ur, h->values.data(), sr.data(), dh, dh);
    for (int i = 0; i < dh; ++i) {
      z[i] = apply_activation(Activation::kSigmoid, sz[i]);
      r[i] = apply_activation(Activation::kSigmoid, sr[i]);
      rh[i] = r[i] * h->values[i];
    }
    std::vector<double> sh(p.bh->values);
    matvec_acc(p.wh, x->values.data(), sh.data(), dh, dx);
    matvec_acc(p.uh, rh.data(), sh.data(), dh, dh);
    for (int i = 0; i < dh; ++i) hc[i] = std::tanh(sh[i]);
  }

  auto out = Tensor::zeros({dh});
  for (int i = 0; i < dh; ++i) {
    out->values[i] = (1.0 - z[i]) * h->values[i] + z[i] * hc[i];
  }

  if (tape_on({&x, &h, &p.wz, &p.uz, &p.bz, &p.wr, &p.ur, &p.br, &p.wh, &p.uh, &p.bh})) {
    Tensor* op = out.get();
    Tensor* xp = x.get();
    Tensor* hp = h.get();
    GruParams pc = p;
    attach(out, {x, h, p.wz, p.uz, p.bz, p.wr, p.ur, p.br, p.wh, p.uh, p.bh},
           [op, xp, hp, pc, z, r, hc, rh, dx, dh] {
             // dM += ds (outer) in ; din += M^T ds
             auto acc_matvec = [](const TensorPtr& m, const std::vector<double>& ds,
                                  const double* in, double* din, int rows, int cols) {
               if (m->requires_grad) {
                 for (int i = 0; i < rows; ++i) {
                   const double g = ds[i];
                   if (g == 0.0) continue;
                   double* mrow = m->grad.data() + static_cast<std::size_t>(i) * cols;
                   for (int j = 0; j < cols; ++j) mrow[j] += g * in[j];
                 }
               }
               for (int i = 0; i < rows; ++i) {
                 const double g = ds[i];
                 if (g == 0.0) continue;
                 const double* mrow = m->values.data() + static_cast<std::size_t>(i) * cols;
                 for (int j = 0; j < cols; ++j) din[j] += g * mrow[j];
               }
             };

             std::vector<double> dsh(dh), dsz(dh), dsr(dh);
             for (int i = 0; i < dh; ++i) {
               const double go = op->grad[i];
               dsh[i] = go * z[i] * (1.0 - hc[i] * hc[i]);
               dsz[i] = go * (hc[i] - hp->values[i]) * z[i] * (1.0 - z[i]);
             }
             // candidate pre-activation feeds from x and from r*h
             std::vector<double> drh(dh, 0.0);
             acc_matvec(pc.uh, dsh, rh.data(), drh.data(), dh, dh);
             for (int i = 0; i < dh; ++i) {
               dsr[i] = drh[i] * hp->values[i] * r[i] * (1.0 - r[i]);
             }

             std::vector<double> dx_acc(dx, 0.0);
             std::vector<double> dh_gate(dh, 0.0);
             acc_matvec(pc.wh, dsh, xp->values.data(), dx_acc.data(), dh, dx);
             acc_matvec(pc.wz, dsz, xp->values.data(), dx_acc.data(), dh, dx);
             acc_matvec(pc.wr, dsr, xp->values.data(), dx_acc.data(), dh, dx);
             acc_matvec(pc.uz, dsz, hp->values.data(), dh_gate.data(), dh, dh);
             acc_matvec(pc.ur, dsr, hp->values.data(), dh_gate.data(), dh, dh);
             if (pc.bh->requires_grad) {
               for (int i = 0; i < dh; ++i) pc.bh->grad[i] += dsh[i];
             }
             if (pc.bz->requires_grad) {
               for (int i = 0; i < dh; ++i) pc.bz->grad[i] += dsz[i];
             }
             if (pc.br->requires_grad) {
               for (int i = 0; i < dh; ++i) pc.br->grad[i] += dsr[i];
             }

             if (hp->requires_grad) {
               for (int i = 0; i < dh; ++i) {
                 // direct path, through r*h, and through both gate pre-activations
                 hp->grad[i] += op->grad[i] * (1.0 - z[i]) + drh[i] * r[i] + dh_gate[i];
               }
             }
             if (xp->requires_grad) {
               for (int j = 0; j < dx; ++j) xp->grad[j] += dx_acc[j];
             }
           });
  }
  return out;
}

TensorPtr softmax(const TensorPtr& logits) {
  if (logits->shape.size() != 1 || logits->size() == 0) {
    throw ConfigError("softmax: input must be a nonempty vector, got " + shape_str(logits->shape));
  }
  const int k = static_cast<int>(logits->size());
  auto out = Tensor::zeros({k});
  double mx = logits->values[0];
  for (double v : logits->values) mx = std::max(mx, v);
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    out->values[i] = std::exp(logits->values[i] - mx);
    sum += out->values[i];
  }
  for (int i = 0; i < k; ++i) out->values[i] /= sum;

  if (tape_on({&logits})) {
    Tensor* op = out.get();
    Tensor* lp = logits.get();
    attach(out, {logits}, [op, lp, k] {
      double dot = 0.0;
      for (int i = 0; i < k; ++i) dot += op->grad[i] * op->values[i];
      for (int i = 0; i < k; ++i) {
        lp->grad[i] += op->values[i] * (op->grad[i] - dot);
      }
    });
  }
  return out;
}

std::vector<TensorPtr> embed_rows(const TensorPtr& table, const std::vector<int>& ids) {
  if (table->shape.size() != 2) {
    throw ConfigError("embed_rows: table must be [V x d], got " + shape_str(table->shape));
  }
  const int vocab = table->shape[0];
  const int dim = table->shape[1];
  std::vector<TensorPtr> out;
  out.reserve(ids.size());
  for (int id : ids) {
    if (id < 0 || id >= vocab) {
      throw ValidationError("embed_rows: token id " + std::to_string(id) +
                            " outside vocabulary of size " + std::to_string(vocab));
    }
    auto row = Tensor::zeros({dim});
    const std::size_t base = static_cast<std::size_t>(id) * dim;
    std::copy_n(table->values.begin() + base, dim, row->values.begin());
    if (tape_on({&table})) {
      Tensor* rp = row.get();
      Tensor* tp = table.get();
      attach(row, {table}, [rp, tp, base, dim] {
        if (!tp->requires_grad) return;
        for (int j = 0; j < dim; ++j) tp->grad[base + j] += rp->grad[j];
      });
    }
    out.push_back(std::move(row));
  }
  return out;
}

TensorPtr concat(const std::vector<TensorPtr>& parts) {
  if (parts.empty()) throw ConfigError("concat: no inputs");
  long long total = 0;
  for (const auto& p : parts) total += p->size();
  auto out = Tensor::zeros({static_cast<int>(total)});
  std::size_t off = 0;
  for (const auto& p : parts) {
    std::copy(p->values.begin(), p->values.end(), out->values.begin() + off);
    off += p->values.size();
  }
  bool any = false;
  for (const auto& p : parts) {
    if (p->requires_grad) any = true;
  }
  if (GradMode::enabled() && any) {
    Tensor* op = out.get();
    std::vector<TensorPtr> parents = parts;
    attach(out, parents, [op, parents] {
      std::size_t off = 0;
      for (const auto& p : parents) {
        if (p->requires_grad) {
          for (std::size_t j = 0; j < p->values.size(); ++j) p->grad[j] += op->grad[off + j];
        }
        off += p->values.size();
      }
    });
  }
  return out;
}

TensorPtr stack_scalars(const std::vector<TensorPtr>& xs) {
  if (xs.empty()) throw ConfigError("stack_scalars: no inputs");
  auto out = Tensor::zeros({static_cast<int>(xs.size())});
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i]->size() != 1) {
      throw ConfigError("stack_scalars: input " + std::to_string(i) + " is not scalar");
    }
    out->values[i] = xs[i]->values[0];
  }
  bool any = false;
  for (const auto& p : xs) {
    if (p->requires_grad) any = true;
  }
  if (GradMode::enabled() && any) {
    Tensor* op = out.get();
    std::vector<TensorPtr> parents = xs;
    attach(out, parents, [op, parents] {
      for (std::size_t i = 0; i < parents.size(); ++i) {
        if (parents[i]->requires_grad) parents[i]->grad[0] += op->grad[i];
      }
    });
  }
  return out;
}

TensorPtr attention_pool(const TensorPtr& alpha, const std::vector<TensorPtr>& o) {
  const int k = static_cast<int>(o.size());
  if (k == 0) throw ConfigError("attention_pool: no token encodings");
  if (alpha->shape != Shape{k}) {
    throw ConfigError("attention_pool: alpha " + shape_str(alpha->shape) + " does not match " +
                      std::to_string(k) + " tokens");
  }
  const int d = static_cast<int>(o[0]->size());
  for (const auto& t : o) {
    if (t->size() != d) throw ConfigError("attention_pool: token encodings differ in size");
  }
  auto out = Tensor::zeros({d});
  const double inv_k = 1.0 / k;
  for (int i = 0; i < k; ++i) {
    const double a = alpha->values[i] * inv_k;
    for (int j = 0; j < d; ++j) out->values[j] += a * o[i]->values[j];
  }

  bool any = alpha->requires_grad;
  for (const auto& p : o) {
    if (p->requires_grad) any = true;
  }
  if (GradMode::enabled() && any) {
    Tensor* op = out.get();
    TensorPtr ap = alpha;
    std::vector<TensorPtr> parents = o;
    parents.push_back(alpha);
    std::vector<TensorPtr> oc = o;
    attach(out, parents, [op, ap, oc, k, d, inv_k] {
      for (int i = 0; i < k; ++i) {
        if (ap->requires_grad) {
          double s = 0.0;
          for (int j = 0; j < d; ++j) s += op->grad[j] * oc[i]->values[j];
          ap->grad[i] += s * inv_k;
        }
        if (oc[i]->requires_grad) {
          const double a = ap->values[i] * inv_k;
          for (int j = 0; j < d; ++j) oc[i]->grad[j] += a * op->grad[j];
        }
      }
    });
  }
  return out;
}

TensorPtr pick(const TensorPtr& v, int index) {
  if (index < 0 || index >= v->size()) {
    throw ConfigError("pick: index " + std::to_string(index) + " out of range for " +
                      shape_str(v->shape));
  }
  auto out = Tensor::scalar(v->values[index]);
  if (tape_on({&v})) {
    Tensor* op = out.get();
    Tensor* vp = v.get();
    attach(out, {v}, [op, vp, index] {
      if (vp->requires_grad) vp->grad[index] += op->grad[0];
    });
  }
  return out;
}

TensorPtr squared_error(const TensorPtr& pred, double target) {
  if (pred->size() != 1) throw ConfigError("squared_error: prediction must be scalar");
  const double diff = pred->values[0] - target;
  auto out = Tensor::scalar(diff * diff);
  if (tape_on({&pred})) {
    Tensor* op = out.get();
    Tensor* pp = pred.get();
    attach(out, {pred}, [op, pp, diff] {
      if (pp->requires_grad) pp->grad[0] += 2.0 * diff * op->grad[0];
    });
  }
  return out;
}

TensorPtr sum_scalars(const std::vector<TensorPtr>& xs) {
  if (xs.empty()) throw ConfigError("sum_scalars: no inputs");
  double s = 0.0;
  for (const auto& x : xs) {
    if (x->size() != 1) throw ConfigError("sum_scalars: inputs must be scalar");
    s += x->values[0];
  }
  auto out = Tensor::scalar(s);
  bool any = false;
  for (const auto& p : xs) {
    if (p->requires_grad) any = true;
  }
  if (GradMode::enabled() && any) {
    Tensor* op = out.get();
    std::vector<TensorPtr> parents = xs;
    attach(out, parents, [op, parents] {
      for (const auto& p : parents) {
        if (p->requires_grad) p->grad[0] += op->grad[0];
      }
    });
  }
  return out;
}

TensorPtr scale(const TensorPtr& t, double c) {
  auto out = Tensor::zeros(t->shape);
  for (std::size_t i = 0; i < t->values.size(); ++i) out->values[i] = c * t->values[i];
  if (tape_on({&t})) {
    Tensor* op = out.get();
    Tensor* tp = t.get();
    attach(out, {t}, [op, tp, c] {
      if (!tp->requires_grad) return;
      for (std::size_t i = 0; i < tp->values.size(); ++i) tp->grad[i] += c * op->grad[i];
    });
  }
  return out;
}

TensorPtr glorot_uniform(const Shape& shape, long long fan_in, long long fan_out, Rng& rng) {
  if (fan_in <= 0 || fan_out <= 0) throw ConfigError("glorot_uniform: fans must be positive");
  const double s = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  auto t = Tensor::zeros(shape);
  for (auto& v : t->values) v = rng.uniform(-s, s);
  return t;
}

}  // namespace follownet
