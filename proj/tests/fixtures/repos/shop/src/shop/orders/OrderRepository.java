package shop.orders;

import java.util.HashMap;
import java.util.Map;

public class OrderRepository {
    private final Map<String, Order> store = new HashMap<>();

    public void save(Order order) {
        store.put(order.getId(), order);
    }

    public Order findById(String id) {
        return store.get(id);
    }
}
