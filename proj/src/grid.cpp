#include "phi4/grid.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace phi4 {

const ModeTable& ModeTable::get(const GridSpec& g) {
    static std::mutex mtx;
    static std::map<std::pair<int, int>, std::unique_ptr<ModeTable>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(g.d, g.n);
    auto it = cache.find(key);
    if (it == cache.end()) {
        it = cache.emplace(key, std::make_unique<ModeTable>(g)).first;
    }
    return *it->second;
}

}  // namespace phi4
