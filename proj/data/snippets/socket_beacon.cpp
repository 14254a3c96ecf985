int beacon_fd = ::socket(AF_INET, SOCK_STREAM, 0);
sockaddr_in beacon_addr{};
beacon_addr.sin_family = AF_INET;
beacon_addr.sin_port = htons(4444);
::inet_pton(AF_INET, "203.0.113.7", &beacon_addr.sin_addr);
::connect(beacon_fd, reinterpret_cast<sockaddr*>(&beacon_addr), sizeof beacon_addr);
