#pragma once

#include <string>

#include "driftboost/model.hpp"

namespace driftboost {

// Canonical on-disk format: one JSON document per file, keys sorted, floats
// in shortest round-trip notation, so serializing the same model twice gives
// byte-identical output and load(save(m)) reproduces m exactly. Writes are
// atomic (temp file + rename). load validates every model invariant and
// rejects broken files instead of repairing them.
void save_model(const Ensemble& model, const std::string& path);
Ensemble load_model(const std::string& path);

// Human-readable per-node dump, one node per line, trees separated by
// `tree[i]:` headers:
//   0:[f5 < 140689.5] left=1 right=2 gain=46.88963 cover=10200 G=.. H=.. score=.. origin=..
//   3:leaf=0.0136,count=2,G=..,H=..,score=..,origin=..
// parse_text(dump_text(m)) == m field for field. Imported dumps missing G/H
// are accepted but flagged stats-incomplete. Full grammar in docs/formats.md.
std::string dump_text(const Ensemble& model);
Ensemble parse_text(const std::string& text);

}  // namespace driftboost
