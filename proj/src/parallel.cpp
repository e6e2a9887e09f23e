#include "serconv/parallel.hpp"

#include "serconv/errors.hpp"

namespace serconv {

Executor::Executor(int workers) : workers_(workers) {
  if (workers < 1) throw DomainError("worker count must be positive");
}

}  // namespace serconv
