#pragma once

#include <string>

#include "ancova_cp/design.hpp"
#include "ancova_cp/layout_io.hpp"

namespace ancova_cp::fixtures {

inline DesignFile reference_design() { return load_design(std::string(ANCOVA_CP_TEST_DATA) + "/reference_design.json"); }

struct Setup {
  DesignFile design;
  GeometryBundle geom;
  TwoStageConfig cfg;
};

inline Setup reference_setup() {
  Setup s;
  s.design = reference_design();
  s.geom = build_geometry(s.design.layout, s.design.contrast);
  s.cfg = critical_values(s.design.layout, 0.05, 0.10, 0.10);
  return s;
}

// Four treatments of unequal size; exercises k ≠ 3 and n_i ≠ n_j.
inline Setup unbalanced_setup() {
  Setup s;
  s.design.layout = AncovaLayout({{3.1, 4.7, 2.2, 5.9, 4.0},
                                  {1.5, 2.8, 3.3, 6.1},
                                  {4.4, 2.9, 5.5, 3.8, 6.6, 2.0},
                                  {3.0, 5.2, 4.1, 1.9, 4.8}});
  s.design.contrast = ContrastSpec::treatment_difference(4, 0, 2, s.design.layout.max_abs_centered());
  s.geom = build_geometry(s.design.layout, s.design.contrast);
  s.cfg = critical_values(s.design.layout, 0.05, 0.10, 0.10);
  return s;
}

}  // namespace ancova_cp::fixtures
