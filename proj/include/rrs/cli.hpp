#ifndef RRS_CLI_HPP
#define RRS_CLI_HPP

#include <string>
#include <vector>

namespace rrs {

//! Run one batch experiment: exit 0 on success, 1 when an embedded assertion
//! fails, 2 on usage errors.  argv excludes the program name.
int dispatch(const std::vector<std::string>& argv);

}  // namespace rrs

#endif
