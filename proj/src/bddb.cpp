#include "cool/bddb.hpp"

namespace cool {

std::atomic<long>& search_expansion_counter() {
    static std::atomic<long> counter{0};
    return counter;
}

} // namespace cool
