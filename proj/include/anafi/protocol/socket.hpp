// Blocking POSIX TCP helpers.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace anafi::protocol {

/// Raises std::runtime_error naming the port when it cannot be bound. Port 0
/// picks a free one; the bound port is returned through `bound`.
int listen_tcp(const std::string& host, std::uint16_t port, std::uint16_t* bound);
int connect_tcp(const std::string& host, std::uint16_t port);
bool write_all(int fd, std::string_view data);
void close_fd(int fd);

}  // namespace anafi::protocol
